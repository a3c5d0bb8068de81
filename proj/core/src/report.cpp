#include "rwcscope/report.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rwcscope/error.hpp"
#include "rwcscope/format.hpp"
#include "rwcscope/svg.hpp"

namespace rwcscope {

using nlohmann::json;

namespace {

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

json assignments_json(const ClusterModel& model, const std::vector<std::string>& layers) {
  json out = json::array();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    out.push_back({{"layer", layers[i]}, {"cluster", model.assignments[i]}});
  }
  return out;
}

json cluster_json(const ClusterModel& model, const std::vector<std::string>& layers) {
  return {{"k", model.k},
          {"seed", model.seed},
          {"inertia", model.inertia},
          {"n_init", model.n_init},
          {"iterations_run", model.iterations_run},
          {"assignments", assignments_json(model, layers)},
          {"centroids", matrix_json(model.centroids)}};
}

std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '-' || c == '.';
    out += ok ? c : '_';
  }
  if (out.empty() || out == "." || out == "..") out = "group";
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) fail(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

std::string rwc_csv_text(const RwcMatrix& m) {
  std::ostringstream s;
  write_rwc_csv(m, s);
  return s.str();
}

json hyper_json(const std::map<std::string, HyperValue>& values) {
  json out = json::object();
  for (const auto& [key, value] : values) {
    std::visit([&, &k = key](const auto& v) { out[k] = v; }, value);
  }
  return out;
}

}  // namespace

Matrix cluster_mean_curves(const RwcMatrix& matrix, const ClusterModel& model) {
  Matrix means(model.k, matrix.transition_count());
  std::vector<std::size_t> counts(model.k, 0);
  for (std::size_t r = 0; r < matrix.layer_count(); ++r) {
    const auto c = model.assignments.at(r);
    ++counts[c];
    auto dst = means.row(c);
    auto src = matrix.values.row(r);
    for (std::size_t t = 0; t < dst.size(); ++t) dst[t] += src[t];
  }
  for (std::size_t c = 0; c < model.k; ++c) {
    if (counts[c] == 0) continue;
    for (double& v : means.row(c)) v /= static_cast<double>(counts[c]);
  }
  return means;
}

std::string cluster_model_json(const ClusterModel& model, const std::vector<std::string>& layers) {
  return cluster_json(model, layers).dump(2) + "\n";
}

std::string scree_csv(const ScreeCurve& curve) {
  std::ostringstream s;
  s << "k,inertia,chosen\n";
  for (std::size_t i = 0; i < curve.ks.size(); ++i) {
    s << curve.ks[i] << ',' << format_real(curve.inertias[i]) << ','
      << (curve.ks[i] == curve.chosen_k ? 1 : 0) << '\n';
  }
  return s.str();
}

std::string pca_scores_csv(const Matrix& scores, const std::vector<std::string>& layers) {
  std::ostringstream s;
  s << "layer";
  for (std::size_t c = 0; c < scores.cols(); ++c) s << ",pc" << (c + 1);
  s << '\n';
  for (std::size_t r = 0; r < scores.rows(); ++r) {
    s << csv_field(layers[r]);
    for (double v : scores.row(r)) s << ',' << format_real(v);
    s << '\n';
  }
  return s.str();
}

std::vector<std::string> write_summary(const AnalysisReport& report,
                                       const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    fail(ErrorKind::Io, "cannot create output directory '" + out_dir.string() + "'");
  }

  std::vector<std::string> written;
  auto emit = [&](const std::string& rel, const std::string& text) {
    write_file(out_dir / rel, text);
    written.push_back(rel);
  };

  emit("rwc.csv", rwc_csv_text(report.rwc));
  emit("rwc_raw.csv", rwc_csv_text(report.raw_rwc));

  json groups = json::array();
  std::set<std::string> used_dirs;
  for (const auto& group : report.groups) {
    std::string dir = sanitize(group.name);
    for (int n = 2; !used_dirs.insert(dir).second; ++n) dir = sanitize(group.name) + "-" + std::to_string(n);
    const std::string base = "groups/" + dir + "/";
    std::filesystem::create_directories(out_dir / base, ec);
    if (ec) fail(ErrorKind::Io, "cannot create '" + (out_dir / base).string() + "'");

    const auto& layers = group.matrix.layer_names;
    const std::string title_suffix = report.model_name.empty() ? "" : " (" + report.model_name + ")";
    json files = json::object();

    emit(base + "rwc.csv", rwc_csv_text(group.matrix));
    files["rwc"] = base + "rwc.csv";
    emit(base + "clusters.json", cluster_model_json(group.clusters, layers));
    files["clusters"] = base + "clusters.json";
    emit(base + "curves.svg", cluster_curves_svg(group.matrix, group.clusters,
                                                 "Clustered RWC curves: " + group.name + title_suffix));
    files["curves_svg"] = base + "curves.svg";
    if (group.scree) {
      emit(base + "scree.csv", scree_csv(*group.scree));
      files["scree"] = base + "scree.csv";
      emit(base + "scree.svg", scree_svg(*group.scree, "Scree: " + group.name + title_suffix));
      files["scree_svg"] = base + "scree.svg";
    }
    if (group.pca) {
      emit(base + "pca.csv", pca_scores_csv(group.pca->scores, layers));
      files["pca"] = base + "pca.csv";
      emit(base + "pca.svg", pca_scatter_svg(group.pca->scores, layers, group.clusters,
                                             "PCA scores: " + group.name + title_suffix));
      files["pca_svg"] = base + "pca.svg";
    }

    json g;
    g["name"] = group.name;
    g["layers"] = layers;
    g["cluster_space"] = group.cluster_space;
    g["k_mode"] = group.k_auto ? "auto" : "explicit";
    g["chosen_k"] = group.clusters.k;
    g["cluster_model"] = cluster_json(group.clusters, layers);
    g["cluster_mean_curves"] = matrix_json(cluster_mean_curves(group.matrix, group.clusters));
    if (group.scree) {
      g["scree"] = {{"ks", group.scree->ks},
                    {"inertias", group.scree->inertias},
                    {"chosen_k", group.scree->chosen_k},
                    {"elbow_k", elbow_k(group.scree->inertias)}};
    } else {
      g["scree"] = nullptr;
    }
    if (group.pca) {
      const auto& m = group.pca->model;
      json scores = json::array();
      for (std::size_t r = 0; r < layers.size(); ++r) {
        json row = {{"layer", layers[r]}};
        for (std::size_t c = 0; c < group.pca->scores.cols(); ++c) {
          row["pc" + std::to_string(c + 1)] = group.pca->scores(r, c);
        }
        scores.push_back(std::move(row));
      }
      g["pca"] = {{"mean", m.mean},
                  {"components", matrix_json(m.components)},
                  {"explained_variance", m.explained_variance},
                  {"explained_variance_ratio", m.explained_variance_ratio},
                  {"scores", std::move(scores)}};
    } else {
      g["pca"] = nullptr;
    }
    g["files"] = std::move(files);
    groups.push_back(std::move(g));
  }

  json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["run_id"] = report.run_id;
  doc["model_name"] = report.model_name;
  doc["dataset_name"] = report.dataset_name;
  doc["settings"] = hyper_json(report.settings);
  doc["layer_count"] = report.rwc.layer_count();
  doc["transition_count"] = report.rwc.transition_count();
  doc["files"] = {{"rwc", "rwc.csv"}, {"rwc_raw", "rwc_raw.csv"}};
  doc["groups"] = std::move(groups);
  emit("report.json", doc.dump(2) + "\n");
  return written;
}

}  // namespace rwcscope
