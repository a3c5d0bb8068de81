#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rwcscope/matrix.hpp"
#include "rwcscope/snapshot.hpp"

namespace rwcscope {

/// Layers x transitions matrix of relative weight change. Column t holds the
/// change between snapshot t and snapshot t+1.
struct RwcMatrix {
  std::vector<std::string> layer_names;
  Matrix values;

  std::size_t layer_count() const noexcept { return values.rows(); }
  std::size_t transition_count() const noexcept { return values.cols(); }

  RwcMatrix select_rows(std::span<const std::size_t> rows) const;

  friend bool operator==(const RwcMatrix&, const RwcMatrix&) = default;
};

/// Relative weight change of one layer across one transition:
///
///   |curr - prev|_1 / |prev|_1
///
/// Throws LengthMismatch for unequal or empty inputs and ZeroDenominator when
/// prev is all zeros.
double rwc_layer(std::span<const double> prev, std::span<const double> curr);

/// One row per layer with at least `min_params` elements, in snapshot order.
/// Snapshots must already be run-consistent (see validate_run).
RwcMatrix build_rwc_matrix(std::span<const WeightSnapshot> snapshots, std::size_t min_params = 0);

enum class ClampScope { PerLayer, Global };

struct ClampConfig {
  double multiplier = 2.0;
  ClampScope scope = ClampScope::PerLayer;
  bool enabled = true;
};

/// Replaces every entry farther than multiplier * sigma from its population
/// mean with that mean. The population is one row (PerLayer) or the whole
/// matrix (Global); sigma is the population (divide-by-N) deviation.
RwcMatrix clamp_outliers(const RwcMatrix& matrix, const ClampConfig& config);

/// CSV with header "layer,t0,...,t{T-1}" and shortest round-trip decimals.
void write_rwc_csv(const RwcMatrix& matrix, std::ostream& out);
void write_rwc_csv(const RwcMatrix& matrix, const std::filesystem::path& path);
RwcMatrix read_rwc_csv(std::istream& in);
RwcMatrix read_rwc_csv(const std::filesystem::path& path);

}  // namespace rwcscope
