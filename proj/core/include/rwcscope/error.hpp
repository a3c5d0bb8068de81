#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rwcscope {

enum class ErrorKind {
  Io,
  InvalidArgument,
  // snapshot container
  MagicMismatch,
  UnsupportedVersion,
  Truncated,
  InvalidUtf8,
  Malformed,
  NonFinite,
  NameCollision,
  EmptySnapshot,
  // run consistency
  InvalidManifest,
  TooFewSnapshots,
  ShapeMismatch,
  MissingLayer,
  LayerOrderMismatch,
  EpochOrder,
  // rwc
  LengthMismatch,
  ZeroDenominator,
  NoLayersRemaining,
  // pca
  DimensionTooSmall,
  DegenerateData,
  DimensionMismatch,
  // clustering
  TooFewDistinctPoints,
  KTooLarge,
  DegenerateInput,
  KMaxTooLarge,
  // taxonomy / report
  InvalidPattern,
  UnknownLayer,
  InvalidCurve,
  // trainer
  LabelOutOfRange,
};

/// Machine-parseable name of an error kind, e.g. "ShapeMismatch".
std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library is an Error carrying its kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return to_string(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace rwcscope
