#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rwcscope/kmeans.hpp"
#include "rwcscope/manifest.hpp"
#include "rwcscope/pca.hpp"
#include "rwcscope/rwc.hpp"

namespace rwcscope {

inline constexpr int kReportSchemaVersion = 1;

struct PcaResult {
  PcaModel model;
  Matrix scores;  // layers x k
};

/// Analysis of one taxonomy group.
struct GroupResult {
  std::string name;
  RwcMatrix matrix;  // clamped RWC rows of this group
  std::string cluster_space = "raw";
  bool k_auto = true;
  ClusterModel clusters;
  std::optional<ScreeCurve> scree;  // absent for single-layer groups
  std::optional<PcaResult> pca;     // absent when PCA is undefined for the group
};

struct AnalysisReport {
  std::string run_id;
  std::string model_name;
  std::string dataset_name;
  std::map<std::string, HyperValue> settings;
  RwcMatrix raw_rwc;
  RwcMatrix rwc;  // after clamping
  std::vector<GroupResult> groups;
};

/// Mean RWC curve of each cluster (k x T).
Matrix cluster_mean_curves(const RwcMatrix& matrix, const ClusterModel& model);

/// {k, seed, inertia, n_init, iterations_run, assignments: [{layer, cluster}], centroids}.
std::string cluster_model_json(const ClusterModel& model, const std::vector<std::string>& layers);

/// "k,inertia,chosen" rows, chosen is 1 for chosen_k and 0 otherwise.
std::string scree_csv(const ScreeCurve& curve);

/// "layer,pc1,pc2" rows (one pc column per component).
std::string pca_scores_csv(const Matrix& scores, const std::vector<std::string>& layers);

/// Writes report.json, rwc.csv, rwc_raw.csv and per group (under
/// groups/<name>/) rwc.csv, clusters.json, curves.svg and, when available,
/// scree.csv, scree.svg, pca.csv, pca.svg. Existing files are overwritten.
/// Returns the written paths relative to `out_dir`, in write order.
std::vector<std::string> write_summary(const AnalysisReport& report,
                                       const std::filesystem::path& out_dir);

}  // namespace rwcscope
