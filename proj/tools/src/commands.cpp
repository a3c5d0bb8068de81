#include "commands.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rwcscope/error.hpp"
#include "rwcscope/format.hpp"
#include "rwcscope/manifest.hpp"
#include "rwcscope/pipeline.hpp"
#include "rwcscope/report.hpp"
#include "rwcscope/rwc.hpp"
#include "rwcscope/svg.hpp"
#include "rwcscope/trainer.hpp"

namespace rwcscope::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string manifest;
  std::vector<std::string> manifests;
  std::string out;
  double clamp_multiplier = 2.0;
  std::string clamp_scope = "layer";
  bool no_clamp = false;
  std::size_t min_params = 0;
  std::string cluster_space = "raw";
  std::string k = "auto";
  std::size_t k_max = 10;
  std::uint64_t seed = 42;
  std::size_t n_init = 10;
  std::string taxonomy = "manifest";
  double late_fraction = 0.5;

  // train-demo
  std::string task = "blobs";
  std::size_t classes = 3;
  std::size_t samples_per_class = 300;
  std::size_t input_dim = 16;
  std::string hidden = "64,64,64,64";
  std::size_t epochs = 25;
  double lr = 0.001;
  std::size_t batch_size = 32;
  double spread = 2.0;
  double noise = 1.0;
  std::string dtype = "f64";
};

void add_analysis_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--clamp-multiplier", o.clamp_multiplier, "Outlier cut-off in std deviations")
      ->capture_default_str();
  cmd->add_option("--clamp-scope", o.clamp_scope, "Outlier population: layer or global")
      ->check(CLI::IsMember({"layer", "global"}))
      ->capture_default_str();
  cmd->add_flag("--no-clamp", o.no_clamp, "Disable outlier clamping");
  cmd->add_option("--min-params", o.min_params, "Skip layers with fewer elements")
      ->capture_default_str();
}

void add_cluster_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--cluster-space", o.cluster_space, "Cluster raw RWC rows or 2-D PCA scores")
      ->check(CLI::IsMember({"raw", "pca2"}))
      ->capture_default_str();
  cmd->add_option("--k", o.k, "Cluster count, or 'auto' for the scree elbow")->capture_default_str();
  cmd->add_option("--k-max", o.k_max, "Largest K on the scree curve")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Seed for every random choice")->capture_default_str();
  cmd->add_option("--n-init", o.n_init, "k-means++ restarts per fit")->capture_default_str();
}

AnalysisConfig to_config(const Options& o) {
  AnalysisConfig c;
  c.clamp.multiplier = o.clamp_multiplier;
  c.clamp.scope = o.clamp_scope == "global" ? ClampScope::Global : ClampScope::PerLayer;
  c.clamp.enabled = !o.no_clamp;
  c.min_params = o.min_params;
  c.cluster_space = o.cluster_space == "pca2" ? ClusterSpace::Pca2 : ClusterSpace::Raw;
  if (o.k != "auto") {
    std::size_t k = 0;
    auto [ptr, ec] = std::from_chars(o.k.data(), o.k.data() + o.k.size(), k);
    if (ec != std::errc() || ptr != o.k.data() + o.k.size() || k == 0) {
      fail(ErrorKind::InvalidArgument, "--k must be a positive integer or 'auto'");
    }
    c.k = k;
  }
  c.k_max = o.k_max;
  c.seed = o.seed;
  c.n_init = o.n_init;
  if (o.taxonomy == "none") {
    c.taxonomy = std::vector<TaxonomyRule>{};
  } else if (o.taxonomy == "efficientnet") {
    c.taxonomy = efficientnet_rules();
  } else if (o.taxonomy == "resnet") {
    c.taxonomy = resnet_rules();
  }
  validate_config(c);
  return c;
}

fs::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) fail(ErrorKind::Io, "cannot create directory '" + dir + "'");
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) fail(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

// Clamped RWC of a whole run, used by the single-stage subcommands.
RwcMatrix clamped_rwc(const LoadedRun& run, const AnalysisConfig& config) {
  return clamp_outliers(build_rwc_matrix(run.snapshots, config.min_params), config.clamp);
}

int cmd_validate(const Options& o, std::ostream& out) {
  const auto manifest = read_manifest(o.manifest);
  const auto base = fs::path(o.manifest).parent_path();
  const auto snapshots = load_run(manifest, base);
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    std::size_t params = 0;
    for (const auto& layer : snapshots[i].layers) params += layer.values.size();
    out << "epoch " << snapshots[i].epoch_index << ": " << manifest.snapshots[i] << ", "
        << snapshots[i].layers.size() << " layers, " << params << " parameters\n";
  }
  if (manifest.taxonomy_rules) Taxonomy rules(*manifest.taxonomy_rules);  // pattern check
  out << "OK: " << snapshots.size() << " snapshots, " << snapshots.front().layers.size()
      << " layers, " << snapshots.size() - 1 << " transitions\n";
  return 0;
}

int cmd_rwc(const Options& o, std::ostream& out) {
  const auto config = to_config(o);
  const auto run = load_run(fs::path(o.manifest));
  const auto matrix = clamped_rwc(run, config);
  const auto dir = ensure_dir(o.out);
  write_rwc_csv(matrix, dir / "rwc.csv");
  out << "wrote " << (dir / "rwc.csv").string() << " (" << matrix.layer_count() << " layers x "
      << matrix.transition_count() << " transitions)\n";
  return 0;
}

int cmd_scree(const Options& o, std::ostream& out) {
  const auto config = to_config(o);
  const auto run = load_run(fs::path(o.manifest));
  const auto group = analyze_group(std::string(kAllGroup), clamped_rwc(run, config), config);
  if (!group.scree) fail(ErrorKind::KMaxTooLarge, "fewer than 2 distinct layers; no scree curve");
  const auto dir = ensure_dir(o.out);
  write_text(dir / "scree.csv", scree_csv(*group.scree));
  render_scree(*group.scree, dir / "scree.svg", "Scree: " + run.manifest.run_id);
  out << "chosen_k=" << group.scree->chosen_k << "\n";
  return 0;
}

int cmd_cluster(const Options& o, std::ostream& out) {
  const auto config = to_config(o);
  const auto run = load_run(fs::path(o.manifest));
  const auto group = analyze_group(std::string(kAllGroup), clamped_rwc(run, config), config);
  const auto dir = ensure_dir(o.out);
  write_text(dir / "clusters.json", cluster_model_json(group.clusters, group.matrix.layer_names));
  render_cluster_curves(group.matrix, group.clusters, dir / "curves.svg",
                        "Clustered RWC curves: " + run.manifest.run_id);
  out << "k=" << group.clusters.k << " inertia=" << format_real(group.clusters.inertia) << "\n";
  return 0;
}

int cmd_analyze(const Options& o, std::ostream& out) {
  const auto config = to_config(o);
  const auto run = load_run(fs::path(o.manifest));
  const auto report = analyze_run(run, config);
  const auto files = write_summary(report, ensure_dir(o.out));
  for (const auto& g : report.groups) {
    out << "group " << g.name << ": " << g.matrix.layer_count() << " layers, k=" << g.clusters.k
        << (g.k_auto ? " (auto)" : "") << "\n";
  }
  out << "wrote " << files.size() << " files to " << o.out << "\n";
  return 0;
}

int cmd_compare(const Options& o, std::ostream& out) {
  if (o.manifests.size() < 2) {
    fail(ErrorKind::InvalidArgument, "compare needs at least two --manifest arguments");
  }
  const auto config = to_config(o);
  nlohmann::json runs = nlohmann::json::array();
  std::ostringstream csv;
  csv << "run_id,transition,late_share\n";
  for (const auto& path : o.manifests) {
    const auto run = load_run(fs::path(path));
    const auto matrix = clamped_rwc(run, config);
    const auto share = late_layer_share(matrix, o.late_fraction);
    runs.push_back({{"run_id", run.manifest.run_id},
                    {"dataset_name", run.manifest.dataset_name},
                    {"manifest", path},
                    {"layers", matrix.layer_names},
                    {"late_layers", share.late_layers},
                    {"late_share_per_transition", share.per_transition},
                    {"mean_late_share", share.mean}});
    for (std::size_t t = 0; t < share.per_transition.size(); ++t) {
      csv << csv_field(run.manifest.run_id) << ',' << t << ','
          << format_real(share.per_transition[t]) << '\n';
    }
    out << run.manifest.run_id << ": mean late-layer RWC share " << format_fixed(share.mean, 4)
        << " over " << share.late_layers.size() << " of " << matrix.layer_count() << " layers\n";
  }
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["metric"] = "late-layer RWC mass / total RWC mass per transition";
  doc["late_fraction"] = o.late_fraction;
  doc["runs"] = std::move(runs);
  const auto dir = ensure_dir(o.out);
  write_text(dir / "comparison.json", doc.dump(2) + "\n");
  write_text(dir / "comparison.csv", csv.str());
  return 0;
}

std::vector<std::size_t> parse_dims(const std::string& text) {
  std::vector<std::size_t> dims;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size() || v == 0) {
      fail(ErrorKind::InvalidArgument, "--hidden must be comma-separated positive integers");
    }
    dims.push_back(v);
  }
  if (dims.empty()) fail(ErrorKind::InvalidArgument, "--hidden needs at least one layer");
  return dims;
}

int cmd_train_demo(const Options& o, std::ostream& out) {
  SyntheticTask task;
  task.num_classes = o.classes;
  task.samples_per_class = o.samples_per_class;
  task.input_dim = o.input_dim;
  task.center_spread = o.spread;
  task.noise = o.noise;
  task.seed = o.seed;

  MlpSpec spec;
  spec.input_dim = o.input_dim;
  spec.hidden_dims = parse_dims(o.hidden);
  spec.num_classes = o.classes;

  TrainConfig config;
  config.epochs = o.epochs;
  config.batch_size = o.batch_size;
  config.adam.lr = o.lr;
  config.seed = o.seed;
  config.snapshot_dtype = o.dtype == "f32" ? DType::F32 : DType::F64;

  const auto result = train_run(task, spec, config, o.out);
  out << "trained " << config.epochs << " epochs: final loss "
      << format_fixed(result.epoch_mean_loss.back(), 4) << ", train accuracy "
      << format_fixed(result.final_train_accuracy, 4) << "\n"
      << "manifest: " << result.manifest_path.string() << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"rwcscope: layer-wise relative weight change analysis"};
  app.require_subcommand(1);
  Options o;

  auto* validate = app.add_subcommand("validate", "Check a run's snapshots for consistency");
  validate->add_option("--manifest", o.manifest, "Run manifest JSON")->required();

  auto* rwc = app.add_subcommand("rwc", "Compute the (clamped) RWC matrix");
  rwc->add_option("--manifest", o.manifest, "Run manifest JSON")->required();
  rwc->add_option("--out", o.out, "Output directory")->required();
  add_analysis_flags(rwc, o);

  auto* scree_cmd = app.add_subcommand("scree", "Inertia against K and the elbow pick");
  scree_cmd->add_option("--manifest", o.manifest, "Run manifest JSON")->required();
  scree_cmd->add_option("--out", o.out, "Output directory")->required();
  add_analysis_flags(scree_cmd, o);
  add_cluster_flags(scree_cmd, o);

  auto* cluster = app.add_subcommand("cluster", "k-means over all layers");
  cluster->add_option("--manifest", o.manifest, "Run manifest JSON")->required();
  cluster->add_option("--out", o.out, "Output directory")->required();
  add_analysis_flags(cluster, o);
  add_cluster_flags(cluster, o);

  auto* analyze = app.add_subcommand("analyze", "Full pipeline and report");
  analyze->add_option("--manifest", o.manifest, "Run manifest JSON")->required();
  analyze->add_option("--out", o.out, "Output directory")->required();
  add_analysis_flags(analyze, o);
  add_cluster_flags(analyze, o);
  analyze->add_option("--taxonomy", o.taxonomy,
                      "Layer grouping: manifest rules, none, efficientnet or resnet presets")
      ->check(CLI::IsMember({"manifest", "none", "efficientnet", "resnet"}))
      ->capture_default_str();

  auto* compare = app.add_subcommand("compare", "Late-layer RWC share across runs");
  compare->add_option("--manifest", o.manifests, "Run manifests (two or more)")->required();
  compare->add_option("--out", o.out, "Output directory")->required();
  compare->add_option("--late-fraction", o.late_fraction, "Fraction of trailing layers counted late")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  add_analysis_flags(compare, o);

  auto* train = app.add_subcommand("train-demo", "Train an MLP on blobs and write snapshots");
  train->add_option("--task", o.task, "Synthetic task")->check(CLI::IsMember({"blobs"}))
      ->capture_default_str();
  train->add_option("--classes", o.classes, "Number of classes")->capture_default_str();
  train->add_option("--samples-per-class", o.samples_per_class, "Samples per class")
      ->capture_default_str();
  train->add_option("--input-dim", o.input_dim, "Input features")->capture_default_str();
  train->add_option("--hidden", o.hidden, "Hidden widths, comma-separated")->capture_default_str();
  train->add_option("--epochs", o.epochs, "Training epochs")->capture_default_str();
  train->add_option("--lr", o.lr, "Adam learning rate")->capture_default_str();
  train->add_option("--batch-size", o.batch_size, "Mini-batch size")->capture_default_str();
  train->add_option("--seed", o.seed, "Seed for data, init and shuffling")->capture_default_str();
  train->add_option("--spread", o.spread, "Class centers drawn from [-spread, spread]")
      ->capture_default_str();
  train->add_option("--noise", o.noise, "Per-feature Gaussian noise scale")->capture_default_str();
  train->add_option("--dtype", o.dtype, "Snapshot dtype")->check(CLI::IsMember({"f32", "f64"}))
      ->capture_default_str();
  train->add_option("--out", o.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*validate) return cmd_validate(o, out);
    if (*rwc) return cmd_rwc(o, out);
    if (*scree_cmd) return cmd_scree(o, out);
    if (*cluster) return cmd_cluster(o, out);
    if (*analyze) return cmd_analyze(o, out);
    if (*compare) return cmd_compare(o, out);
    if (*train) return cmd_train_demo(o, out);
  } catch (const Error& e) {
    err << "error: " << e.name() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: Internal: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace rwcscope::cli
