#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rwcscope/manifest.hpp"
#include "rwcscope/report.hpp"
#include "rwcscope/rwc.hpp"
#include "rwcscope/taxonomy.hpp"

namespace rwcscope {

enum class ClusterSpace { Raw, Pca2 };

struct AnalysisConfig {
  ClampConfig clamp;
  std::size_t min_params = 0;
  ClusterSpace cluster_space = ClusterSpace::Raw;
  std::optional<std::size_t> k;  // nullopt = elbow of the scree curve
  std::size_t k_max = 10;
  std::uint64_t seed = 42;
  std::size_t n_init = 10;
  /// Overrides the manifest's taxonomy rules when set.
  std::optional<std::vector<TaxonomyRule>> taxonomy;
};

/// Group name used when no taxonomy rules apply.
inline constexpr std::string_view kAllGroup = "all";

/// Throws InvalidArgument for k_max < 2, k > k_max, n_init == 0.
void validate_config(const AnalysisConfig& config);

/// PCA, scree (k_max clamped to the group's distinct rows) and k-means for one
/// already-clamped group matrix.
GroupResult analyze_group(std::string name, const RwcMatrix& matrix, const AnalysisConfig& config);

/// Clamps `raw`, splits it by taxonomy and analyzes every group.
AnalysisReport analyze_matrix(const RwcMatrix& raw,
                              const std::optional<std::vector<TaxonomyRule>>& rules,
                              const AnalysisConfig& config);

/// load -> RWC -> clamp -> taxonomy split -> per-group analysis.
AnalysisReport analyze_run(const LoadedRun& run, const AnalysisConfig& config);

/// Share of per-epoch RWC mass carried by the last layers of a matrix.
struct LateLayerShare {
  std::vector<std::string> late_layers;
  std::vector<double> per_transition;  // late mass / total mass, 0 when total is 0
  double mean = 0.0;
};

/// Late layers are the last max(1, floor(rows * late_fraction)) rows.
LateLayerShare late_layer_share(const RwcMatrix& matrix, double late_fraction = 0.5);

}  // namespace rwcscope
