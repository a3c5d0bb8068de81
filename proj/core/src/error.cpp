#include "rwcscope/error.hpp"

namespace rwcscope {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Io: return "IoError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::MagicMismatch: return "MagicMismatch";
    case ErrorKind::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorKind::Truncated: return "Truncated";
    case ErrorKind::InvalidUtf8: return "InvalidUtf8";
    case ErrorKind::Malformed: return "Malformed";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NameCollision: return "NameCollision";
    case ErrorKind::EmptySnapshot: return "EmptySnapshot";
    case ErrorKind::InvalidManifest: return "InvalidManifest";
    case ErrorKind::TooFewSnapshots: return "TooFewSnapshots";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::MissingLayer: return "MissingLayer";
    case ErrorKind::LayerOrderMismatch: return "LayerOrderMismatch";
    case ErrorKind::EpochOrder: return "EpochOrder";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::NoLayersRemaining: return "NoLayersRemaining";
    case ErrorKind::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorKind::DegenerateData: return "DegenerateData";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::TooFewDistinctPoints: return "TooFewDistinctPoints";
    case ErrorKind::KTooLarge: return "KTooLarge";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::KMaxTooLarge: return "KMaxTooLarge";
    case ErrorKind::InvalidPattern: return "InvalidPattern";
    case ErrorKind::UnknownLayer: return "UnknownLayer";
    case ErrorKind::InvalidCurve: return "InvalidCurve";
    case ErrorKind::LabelOutOfRange: return "LabelOutOfRange";
  }
  return "Unknown";
}

}  // namespace rwcscope
