#include "rwcscope/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "rwcscope/error.hpp"
#include "rwcscope/kmeans.hpp"
#include "rwcscope/pca.hpp"

namespace rwcscope {

void validate_config(const AnalysisConfig& config) {
  if (config.k_max < 2) fail(ErrorKind::InvalidArgument, "k_max must be at least 2");
  if (config.k && (*config.k == 0 || *config.k > config.k_max)) {
    fail(ErrorKind::InvalidArgument, "explicit k must be in [1, k_max]");
  }
  if (config.n_init == 0) fail(ErrorKind::InvalidArgument, "n_init must be positive");
  if (!(config.clamp.multiplier > 0.0)) {
    fail(ErrorKind::InvalidArgument, "clamp multiplier must be positive");
  }
}

GroupResult analyze_group(std::string name, const RwcMatrix& matrix, const AnalysisConfig& config) {
  GroupResult result;
  result.name = std::move(name);
  result.matrix = matrix;
  result.k_auto = !config.k.has_value();
  result.cluster_space = config.cluster_space == ClusterSpace::Raw ? "raw" : "pca2";

  const std::size_t layers = matrix.layer_count();
  if (config.k && *config.k > layers) {
    fail(ErrorKind::KTooLarge, "KTooLarge: k=" + std::to_string(*config.k) + " exceeds the " +
                                   std::to_string(layers) + " layers of group '" + result.name +
                                   "'");
  }

  if (layers >= 2 && count_distinct_rows(matrix.values) >= 2) {
    PcaResult pca;
    pca.model = fit_pca(matrix.values, std::min<std::size_t>(2, matrix.transition_count()));
    pca.scores = transform(pca.model, matrix.values);
    result.pca = std::move(pca);
  }

  const Matrix* points = &matrix.values;
  if (config.cluster_space == ClusterSpace::Pca2) {
    if (!result.pca) {
      fail(ErrorKind::DegenerateData,
           "group '" + result.name + "' has no PCA projection to cluster in (pca2 space)");
    }
    points = &result.pca->scores;
  }

  KMeansOptions options;
  options.n_init = config.n_init;

  const std::size_t k_max = std::min(config.k_max, count_distinct_rows(*points));
  if (k_max >= 2) result.scree = scree(*points, k_max, config.seed, options);

  std::size_t k = 1;
  if (config.k) {
    k = *config.k;
  } else if (result.scree) {
    k = result.scree->chosen_k;
  }
  // An explicit k above the distinct rows fails here with DegenerateInput;
  // otherwise k <= k_max and the scree marker can point at it.
  result.clusters = kmeans_fit(*points, k, config.seed, options);
  if (result.scree) result.scree->chosen_k = k;
  return result;
}

AnalysisReport analyze_matrix(const RwcMatrix& raw,
                              const std::optional<std::vector<TaxonomyRule>>& rules,
                              const AnalysisConfig& config) {
  validate_config(config);

  AnalysisReport report;
  report.raw_rwc = raw;
  report.rwc = clamp_outliers(raw, config.clamp);

  std::map<std::string, RwcMatrix> groups;
  if (rules && !rules->empty()) {
    groups = split_matrix(report.rwc, assign_groups(report.rwc.layer_names, *rules));
  } else {
    groups.emplace(std::string(kAllGroup), report.rwc);
  }
  for (const auto& [name, matrix] : groups) {
    report.groups.push_back(analyze_group(name, matrix, config));
  }

  auto& s = report.settings;
  s["clamp_enabled"] = config.clamp.enabled;
  s["clamp_multiplier"] = config.clamp.multiplier;
  s["clamp_scope"] = std::string(config.clamp.scope == ClampScope::PerLayer ? "layer" : "global");
  s["min_params"] = static_cast<std::int64_t>(config.min_params);
  s["cluster_space"] = std::string(config.cluster_space == ClusterSpace::Raw ? "raw" : "pca2");
  s["k"] = config.k ? HyperValue(static_cast<std::int64_t>(*config.k)) : HyperValue(std::string("auto"));
  s["k_max"] = static_cast<std::int64_t>(config.k_max);
  s["seed"] = static_cast<std::int64_t>(config.seed);
  s["n_init"] = static_cast<std::int64_t>(config.n_init);
  return report;
}

AnalysisReport analyze_run(const LoadedRun& run, const AnalysisConfig& config) {
  validate_config(config);
  const auto raw = build_rwc_matrix(run.snapshots, config.min_params);
  const auto& rules = config.taxonomy ? config.taxonomy : run.manifest.taxonomy_rules;
  auto report = analyze_matrix(raw, rules, config);
  report.run_id = run.manifest.run_id;
  report.model_name = run.manifest.model_name;
  report.dataset_name = run.manifest.dataset_name;
  return report;
}

LateLayerShare late_layer_share(const RwcMatrix& matrix, double late_fraction) {
  if (!(late_fraction > 0.0 && late_fraction <= 1.0)) {
    fail(ErrorKind::InvalidArgument, "late_fraction must be in (0, 1]");
  }
  const std::size_t rows = matrix.layer_count();
  if (rows == 0) fail(ErrorKind::NoLayersRemaining, "late-layer share of an empty matrix");
  const auto late = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(static_cast<double>(rows) * late_fraction)));
  const std::size_t first_late = rows - late;

  LateLayerShare out;
  out.late_layers.assign(matrix.layer_names.begin() + static_cast<std::ptrdiff_t>(first_late),
                         matrix.layer_names.end());
  double sum = 0.0;
  for (std::size_t t = 0; t < matrix.transition_count(); ++t) {
    double total = 0.0;
    double late_mass = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      total += matrix.values(r, t);
      if (r >= first_late) late_mass += matrix.values(r, t);
    }
    const double share = total > 0.0 ? late_mass / total : 0.0;
    out.per_transition.push_back(share);
    sum += share;
  }
  out.mean = out.per_transition.empty() ? 0.0 : sum / static_cast<double>(out.per_transition.size());
  return out;
}

}  // namespace rwcscope
