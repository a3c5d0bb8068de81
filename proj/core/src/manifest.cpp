#include "rwcscope/manifest.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rwcscope/error.hpp"
#include "rwcscope/parallel.hpp"

namespace rwcscope {

using nlohmann::json;

namespace {

std::string shape_text(const std::vector<std::uint32_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

std::string require_string(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_string()) {
    fail(ErrorKind::InvalidManifest, std::string("manifest key '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

}  // namespace

std::string manifest_to_json(const RunManifest& manifest) {
  json doc;
  doc["run_id"] = manifest.run_id;
  doc["model_name"] = manifest.model_name;
  doc["dataset_name"] = manifest.dataset_name;
  doc["snapshots"] = manifest.snapshots;
  if (manifest.taxonomy_rules) {
    json rules = json::array();
    for (const auto& r : *manifest.taxonomy_rules) {
      rules.push_back({{"group", r.group}, {"pattern", r.pattern}, {"priority", r.priority}});
    }
    doc["taxonomy_rules"] = std::move(rules);
  }
  json hyper = json::object();
  for (const auto& [key, value] : manifest.hyperparameters) {
    std::visit([&, &k = key](const auto& v) { hyper[k] = v; }, value);
  }
  doc["hyperparameters"] = std::move(hyper);
  return doc.dump(2) + "\n";
}

RunManifest manifest_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::InvalidManifest, std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorKind::InvalidManifest, "manifest must be a JSON object");

  RunManifest m;
  m.run_id = require_string(doc, "run_id");
  m.model_name = require_string(doc, "model_name");
  m.dataset_name = require_string(doc, "dataset_name");

  auto snaps = doc.find("snapshots");
  if (snaps == doc.end() || !snaps->is_array()) {
    fail(ErrorKind::InvalidManifest, "manifest key 'snapshots' must be an array");
  }
  for (const auto& s : *snaps) {
    if (!s.is_string()) fail(ErrorKind::InvalidManifest, "snapshot paths must be strings");
    m.snapshots.push_back(s.get<std::string>());
  }

  if (auto rules = doc.find("taxonomy_rules"); rules != doc.end() && !rules->is_null()) {
    if (!rules->is_array()) fail(ErrorKind::InvalidManifest, "'taxonomy_rules' must be an array");
    std::vector<TaxonomyRule> parsed;
    for (const auto& r : *rules) {
      if (!r.is_object() || !r.contains("group") || !r.contains("pattern") ||
          !r["group"].is_string() || !r["pattern"].is_string()) {
        fail(ErrorKind::InvalidManifest, "taxonomy rule needs string 'group' and 'pattern'");
      }
      TaxonomyRule rule{r["group"].get<std::string>(), r["pattern"].get<std::string>(), 0};
      if (auto p = r.find("priority"); p != r.end()) {
        if (!p->is_number_integer()) {
          fail(ErrorKind::InvalidManifest, "taxonomy rule 'priority' must be an integer");
        }
        rule.priority = p->get<int>();
      }
      parsed.push_back(std::move(rule));
    }
    m.taxonomy_rules = std::move(parsed);
  }

  if (auto hyper = doc.find("hyperparameters"); hyper != doc.end() && !hyper->is_null()) {
    if (!hyper->is_object()) fail(ErrorKind::InvalidManifest, "'hyperparameters' must be an object");
    for (const auto& [key, v] : hyper->items()) {
      if (v.is_boolean()) {
        m.hyperparameters[key] = v.get<bool>();
      } else if (v.is_number_integer()) {
        m.hyperparameters[key] = v.get<std::int64_t>();
      } else if (v.is_number()) {
        m.hyperparameters[key] = v.get<double>();
      } else if (v.is_string()) {
        m.hyperparameters[key] = v.get<std::string>();
      } else {
        fail(ErrorKind::InvalidManifest, "hyperparameter '" + key + "' must be a scalar");
      }
    }
  }
  return m;
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open manifest '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return manifest_from_json(buf.str());
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  const auto text = manifest_to_json(manifest);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) fail(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

void validate_run(std::span<const WeightSnapshot> snapshots) {
  if (snapshots.size() < 2) fail(ErrorKind::TooFewSnapshots, "≥2 snapshots required");

  const auto& ref = snapshots.front();
  for (std::size_t s = 1; s < snapshots.size(); ++s) {
    const auto& snap = snapshots[s];
    if (snap.epoch_index <= snapshots[s - 1].epoch_index) {
      fail(ErrorKind::EpochOrder, "snapshot " + std::to_string(s) + " has epoch " +
                                      std::to_string(snap.epoch_index) +
                                      ", not after epoch " +
                                      std::to_string(snapshots[s - 1].epoch_index));
    }
    for (const auto& layer : ref.layers) {
      const auto* other = snap.find(layer.name);
      if (!other) {
        fail(ErrorKind::MissingLayer, "MissingLayer(" + layer.name + ", epoch " +
                                          std::to_string(snap.epoch_index) + ")");
      }
      if (other->shape != layer.shape) {
        fail(ErrorKind::ShapeMismatch,
             "ShapeMismatch(" + layer.name + ", epoch " + std::to_string(ref.epoch_index) + " " +
                 shape_text(layer.shape) + ", epoch " + std::to_string(snap.epoch_index) + " " +
                 shape_text(other->shape) + ")");
      }
    }
    for (const auto& layer : snap.layers) {
      if (!ref.find(layer.name)) {
        fail(ErrorKind::MissingLayer, "MissingLayer(" + layer.name + ", epoch " +
                                          std::to_string(ref.epoch_index) + ")");
      }
    }
    for (std::size_t l = 0; l < ref.layers.size(); ++l) {
      if (snap.layers[l].name != ref.layers[l].name) {
        fail(ErrorKind::LayerOrderMismatch, "layer order at epoch " +
                                                std::to_string(snap.epoch_index) +
                                                " differs from epoch " +
                                                std::to_string(ref.epoch_index));
      }
    }
  }
}

std::vector<WeightSnapshot> load_run(const RunManifest& manifest,
                                     const std::filesystem::path& base_dir) {
  if (manifest.snapshots.size() < 2) fail(ErrorKind::TooFewSnapshots, "≥2 snapshots required");

  std::vector<WeightSnapshot> snapshots(manifest.snapshots.size());
  parallel_for(snapshots.size(), [&](std::size_t i) {
    std::filesystem::path p(manifest.snapshots[i]);
    if (p.is_relative()) p = base_dir / p;
    snapshots[i] = read_snapshot(p);
  });
  validate_run(snapshots);
  return snapshots;
}

LoadedRun load_run(const std::filesystem::path& manifest_path) {
  LoadedRun run;
  run.manifest = read_manifest(manifest_path);
  run.snapshots = load_run(run.manifest, manifest_path.parent_path());
  return run;
}

}  // namespace rwcscope
