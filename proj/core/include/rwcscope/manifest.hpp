#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rwcscope/snapshot.hpp"
#include "rwcscope/taxonomy.hpp"

namespace rwcscope {

/// Scalar hyperparameter value (learning rate, batch size, image size...).
using HyperValue = std::variant<bool, std::int64_t, double, std::string>;

/// A training run: ordered snapshot files plus metadata. Snapshot paths are
/// relative to the manifest's directory unless absolute.
struct RunManifest {
  std::string run_id;
  std::string model_name;
  std::string dataset_name;
  std::vector<std::string> snapshots;
  std::optional<std::vector<TaxonomyRule>> taxonomy_rules;
  std::map<std::string, HyperValue> hyperparameters;

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(std::string_view text);

RunManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);

/// Checks cross-snapshot consistency: at least two snapshots, strictly
/// increasing epochs, identical layer names, order and shapes.
void validate_run(std::span<const WeightSnapshot> snapshots);

/// Reads every snapshot listed by `manifest` (resolved against `base_dir`) in
/// manifest order and validates the run.
std::vector<WeightSnapshot> load_run(const RunManifest& manifest,
                                     const std::filesystem::path& base_dir);

/// Convenience: read_manifest + load_run relative to the manifest's directory.
struct LoadedRun {
  RunManifest manifest;
  std::vector<WeightSnapshot> snapshots;
};
LoadedRun load_run(const std::filesystem::path& manifest_path);

}  // namespace rwcscope
