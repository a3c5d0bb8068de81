#pragma once

// WSNP weight-snapshot container.
//
// Byte layout, all integers little-endian:
//
//   magic        4 bytes  "WSNP"
//   version      u16      1
//   flags        u16      0
//   epoch_index  u32
//   layer_count  u32
//   per layer:
//     name_len   u16
//     name       name_len bytes, UTF-8
//     dtype      u8       0 = F32, 1 = F64
//     rank       u8       >= 1
//     dims       rank x u32, each >= 1
//     payload    product(dims) x (4 | 8) bytes, IEEE-754, row-major
//
// Files that deviate from this layout in any way, including trailing bytes,
// are rejected with a typed Error.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace rwcscope {

enum class DType : std::uint8_t { F32 = 0, F64 = 1 };

inline constexpr std::size_t dtype_size(DType d) { return d == DType::F32 ? 4 : 8; }

struct LayerTensor {
  std::string name;
  DType dtype = DType::F64;
  std::vector<std::uint32_t> shape;
  /// Row-major values. For F32 tensors the values are rounded to float on write.
  std::vector<double> values;

  std::size_t element_count() const;

  friend bool operator==(const LayerTensor&, const LayerTensor&) = default;
};

struct WeightSnapshot {
  std::uint32_t epoch_index = 0;
  std::vector<LayerTensor> layers;

  const LayerTensor* find(std::string_view name) const;

  friend bool operator==(const WeightSnapshot&, const WeightSnapshot&) = default;
};

inline constexpr std::uint16_t kWsnpVersion = 1;

/// Serializes a snapshot; validates every invariant before producing bytes.
std::vector<std::uint8_t> encode_snapshot(const WeightSnapshot& snapshot);

/// Parses a complete WSNP byte image.
WeightSnapshot decode_snapshot(std::span<const std::uint8_t> bytes);

void write_snapshot(const WeightSnapshot& snapshot, const std::filesystem::path& path);
WeightSnapshot read_snapshot(const std::filesystem::path& path);

/// True when `text` is well-formed UTF-8 (no overlongs, no surrogates).
bool is_valid_utf8(std::string_view text);

}  // namespace rwcscope
