#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rwcscope/manifest.hpp"
#include "rwcscope/snapshot.hpp"

namespace rwcscope::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    const auto base = std::filesystem::temp_directory_path();
    do {
      path_ = base / ("rwcscope-test-" + std::to_string(rd()) + std::to_string(rd()));
    } while (std::filesystem::exists(path_));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

/// Writes snapshots as epoch_{i}.wsnp plus manifest.json into `dir`.
inline std::filesystem::path write_run(const std::filesystem::path& dir,
                                       const std::vector<WeightSnapshot>& snapshots,
                                       const std::string& run_id = "test-run") {
  std::filesystem::create_directories(dir);
  RunManifest manifest;
  manifest.run_id = run_id;
  manifest.model_name = "toy";
  manifest.dataset_name = "synthetic";
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    const std::string name = "epoch_" + std::to_string(i) + ".wsnp";
    write_snapshot(snapshots[i], dir / name);
    manifest.snapshots.push_back(name);
  }
  write_manifest(manifest, dir / "manifest.json");
  return dir / "manifest.json";
}

/// Single-layer snapshot helper.
inline WeightSnapshot one_layer(std::uint32_t epoch, std::string name,
                                std::vector<std::uint32_t> shape, std::vector<double> values) {
  WeightSnapshot s;
  s.epoch_index = epoch;
  s.layers.push_back({std::move(name), DType::F64, std::move(shape), std::move(values)});
  return s;
}

}  // namespace rwcscope::testing
