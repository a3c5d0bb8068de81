#include "rwcscope/snapshot.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <unordered_set>

#include "rwcscope/error.hpp"

namespace rwcscope {

namespace {

constexpr std::array<char, 4> kMagic{'W', 'S', 'N', 'P'};

class ByteWriter {
 public:
  template <typename T>
  void put(T value) {
    static_assert(std::is_unsigned_v<T>);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bytes_.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
    }
  }
  void put_bytes(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }
  void reserve(std::size_t n) { bytes_.reserve(n); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get(const char* what) {
    need(sizeof(T), what);
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      value |= static_cast<T>(static_cast<T>(bytes_[pos_ + i]) << (8 * i));
    }
    pos_ += sizeof(T);
    return value;
  }

  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    need(n, what);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n, const char* what) {
    if (remaining() < n) {
      fail(ErrorKind::Truncated, std::string("truncated WSNP data while reading ") + what +
                                     " at offset " + std::to_string(pos_));
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::size_t checked_element_count(const LayerTensor& layer) {
  if (layer.shape.empty()) {
    fail(ErrorKind::Malformed, "layer '" + layer.name + "' has rank 0");
  }
  if (layer.shape.size() > std::numeric_limits<std::uint8_t>::max()) {
    fail(ErrorKind::Malformed, "layer '" + layer.name + "' rank exceeds 255");
  }
  std::size_t count = 1;
  for (auto d : layer.shape) {
    if (d == 0) fail(ErrorKind::Malformed, "layer '" + layer.name + "' has a zero dimension");
    if (count > std::numeric_limits<std::size_t>::max() / d) {
      fail(ErrorKind::Malformed, "layer '" + layer.name + "' element count overflows");
    }
    count *= d;
  }
  return count;
}

void validate_for_write(const WeightSnapshot& snapshot) {
  if (snapshot.layers.empty()) {
    fail(ErrorKind::EmptySnapshot, "snapshot must contain ≥1 layer");
  }
  if (snapshot.layers.size() > std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorKind::Malformed, "too many layers for WSNP");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& layer : snapshot.layers) {
    if (layer.name.size() > std::numeric_limits<std::uint16_t>::max()) {
      fail(ErrorKind::Malformed, "layer name longer than 65535 bytes");
    }
    if (!is_valid_utf8(layer.name)) {
      fail(ErrorKind::InvalidUtf8, "layer name is not valid UTF-8");
    }
    if (!seen.insert(layer.name).second) {
      fail(ErrorKind::NameCollision, "duplicate layer name '" + layer.name + "'");
    }
    if (layer.dtype != DType::F32 && layer.dtype != DType::F64) {
      fail(ErrorKind::Malformed, "layer '" + layer.name + "' has an unknown dtype");
    }
    const std::size_t count = checked_element_count(layer);
    if (count != layer.values.size()) {
      fail(ErrorKind::ShapeMismatch, "layer '" + layer.name + "' holds " +
                                         std::to_string(layer.values.size()) +
                                         " values but its shape implies " +
                                         std::to_string(count));
    }
    for (std::size_t i = 0; i < layer.values.size(); ++i) {
      const double v = layer.values[i];
      const bool finite = layer.dtype == DType::F64
                              ? std::isfinite(v)
                              : std::isfinite(static_cast<float>(v)) && std::isfinite(v);
      if (!finite) {
        fail(ErrorKind::NonFinite, "layer '" + layer.name + "' has a non-finite value at index " +
                                       std::to_string(i));
      }
    }
  }
}

}  // namespace

std::size_t LayerTensor::element_count() const {
  std::size_t count = shape.empty() ? 0 : 1;
  for (auto d : shape) count *= d;
  return count;
}

const LayerTensor* WeightSnapshot::find(std::string_view name) const {
  for (const auto& layer : layers) {
    if (layer.name == name) return &layer;
  }
  return nullptr;
}

bool is_valid_utf8(std::string_view text) {
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    std::size_t extra = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= n) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    static constexpr std::uint32_t kMinForLength[] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMinForLength[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += extra + 1;
  }
  return true;
}

std::vector<std::uint8_t> encode_snapshot(const WeightSnapshot& snapshot) {
  validate_for_write(snapshot);

  ByteWriter out;
  std::size_t estimate = 16;
  for (const auto& layer : snapshot.layers) {
    estimate += 4 + layer.name.size() + 4 * layer.shape.size() +
                layer.values.size() * dtype_size(layer.dtype);
  }
  out.reserve(estimate);

  out.put_bytes(std::string_view(kMagic.data(), kMagic.size()));
  out.put<std::uint16_t>(kWsnpVersion);
  out.put<std::uint16_t>(0);
  out.put<std::uint32_t>(snapshot.epoch_index);
  out.put<std::uint32_t>(static_cast<std::uint32_t>(snapshot.layers.size()));

  for (const auto& layer : snapshot.layers) {
    out.put<std::uint16_t>(static_cast<std::uint16_t>(layer.name.size()));
    out.put_bytes(layer.name);
    out.put<std::uint8_t>(static_cast<std::uint8_t>(layer.dtype));
    out.put<std::uint8_t>(static_cast<std::uint8_t>(layer.shape.size()));
    for (auto d : layer.shape) out.put<std::uint32_t>(d);
    if (layer.dtype == DType::F32) {
      for (double v : layer.values) out.put(std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    } else {
      for (double v : layer.values) out.put(std::bit_cast<std::uint64_t>(v));
    }
  }
  return out.take();
}

WeightSnapshot decode_snapshot(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);

  auto magic = in.take(4, "magic");
  if (std::memcmp(magic.data(), kMagic.data(), 4) != 0) {
    fail(ErrorKind::MagicMismatch, "not a WSNP file (bad magic)");
  }
  const auto version = in.get<std::uint16_t>("version");
  if (version != kWsnpVersion) {
    fail(ErrorKind::UnsupportedVersion, "unsupported WSNP version " + std::to_string(version));
  }
  const auto flags = in.get<std::uint16_t>("flags");
  if (flags != 0) {
    fail(ErrorKind::Malformed, "nonzero WSNP flags " + std::to_string(flags));
  }

  WeightSnapshot snapshot;
  snapshot.epoch_index = in.get<std::uint32_t>("epoch_index");
  const auto layer_count = in.get<std::uint32_t>("layer_count");
  if (layer_count == 0) fail(ErrorKind::EmptySnapshot, "snapshot must contain ≥1 layer");

  std::unordered_set<std::string> seen;
  for (std::uint32_t l = 0; l < layer_count; ++l) {
    LayerTensor layer;
    const auto name_len = in.get<std::uint16_t>("name_len");
    auto name_bytes = in.take(name_len, "layer name");
    layer.name.assign(name_bytes.begin(), name_bytes.end());
    if (!is_valid_utf8(layer.name)) {
      fail(ErrorKind::InvalidUtf8, "layer " + std::to_string(l) + " name is not valid UTF-8");
    }
    if (!seen.insert(layer.name).second) {
      fail(ErrorKind::NameCollision, "duplicate layer name '" + layer.name + "'");
    }

    const auto dtype = in.get<std::uint8_t>("dtype");
    if (dtype > 1) {
      fail(ErrorKind::Malformed, "layer '" + layer.name + "' has unknown dtype " +
                                     std::to_string(dtype));
    }
    layer.dtype = static_cast<DType>(dtype);
    const auto rank = in.get<std::uint8_t>("rank");
    layer.shape.reserve(rank);
    for (std::uint8_t r = 0; r < rank; ++r) layer.shape.push_back(in.get<std::uint32_t>("dims"));
    const std::size_t count = checked_element_count(layer);

    const std::size_t width = dtype_size(layer.dtype);
    if (count > in.remaining() / width) {
      fail(ErrorKind::Truncated, "layer '" + layer.name + "' declares " + std::to_string(count) +
                                     " elements but only " + std::to_string(in.remaining()) +
                                     " payload bytes remain");
    }
    auto payload = in.take(count * width, "payload");
    layer.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      const auto* p = payload.data() + i * width;
      double v;
      if (layer.dtype == DType::F32) {
        std::uint32_t raw = 0;
        for (std::size_t b = 0; b < 4; ++b) raw |= std::uint32_t{p[b]} << (8 * b);
        v = static_cast<double>(std::bit_cast<float>(raw));
      } else {
        std::uint64_t raw = 0;
        for (std::size_t b = 0; b < 8; ++b) raw |= std::uint64_t{p[b]} << (8 * b);
        v = std::bit_cast<double>(raw);
      }
      if (!std::isfinite(v)) {
        fail(ErrorKind::NonFinite, "layer '" + layer.name + "' has a non-finite value at index " +
                                       std::to_string(i));
      }
      layer.values[i] = v;
    }
    snapshot.layers.push_back(std::move(layer));
  }

  if (in.remaining() != 0) {
    fail(ErrorKind::Malformed, std::to_string(in.remaining()) + " trailing bytes after last layer");
  }
  return snapshot;
}

void write_snapshot(const WeightSnapshot& snapshot, const std::filesystem::path& path) {
  const auto bytes = encode_snapshot(snapshot);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) fail(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

WeightSnapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::Io, "failed reading '" + path.string() + "'");
  try {
    return decode_snapshot(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace rwcscope
