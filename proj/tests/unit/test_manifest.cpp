#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "expect_error.hpp"
#include "fixtures.hpp"
#include "rwcscope/manifest.hpp"

using namespace rwcscope;
using rwcscope::testing::one_layer;
using rwcscope::testing::TempDir;
using rwcscope::testing::write_run;

namespace {

RunManifest full_manifest() {
  RunManifest m;
  m.run_id = "r1";
  m.model_name = "mlp";
  m.dataset_name = "blobs";
  m.snapshots = {"epoch_0.wsnp", "epoch_1.wsnp"};
  m.taxonomy_rules = std::vector<TaxonomyRule>{{"depthwise", ".*depthwise.*", 0}, {"head", "^fc", 3}};
  m.hyperparameters = {{"lr", 0.001}, {"batch_size", std::int64_t{32}},
                       {"optimizer", std::string("adam")}, {"augment", false}};
  return m;
}

std::vector<WeightSnapshot> three_consistent() {
  return {one_layer(0, "conv1", {3, 3}, std::vector<double>(9, 1.0)),
          one_layer(1, "conv1", {3, 3}, std::vector<double>(9, 1.5)),
          one_layer(2, "conv1", {3, 3}, std::vector<double>(9, 2.0))};
}

}  // namespace

TEST(ManifestJson, RoundTrip) {
  const auto m = full_manifest();
  EXPECT_EQ(manifest_from_json(manifest_to_json(m)), m);
}

TEST(ManifestJson, UsesDocumentedKeys) {
  const auto doc = nlohmann::json::parse(manifest_to_json(full_manifest()));
  EXPECT_EQ(doc.at("run_id"), "r1");
  EXPECT_EQ(doc.at("model_name"), "mlp");
  EXPECT_EQ(doc.at("dataset_name"), "blobs");
  EXPECT_EQ(doc.at("snapshots"), nlohmann::json({"epoch_0.wsnp", "epoch_1.wsnp"}));
  EXPECT_EQ(doc.at("taxonomy_rules")[1],
            nlohmann::json({{"group", "head"}, {"pattern", "^fc"}, {"priority", 3}}));
  EXPECT_EQ(doc.at("hyperparameters").at("lr"), 0.001);
  EXPECT_EQ(doc.at("hyperparameters").at("batch_size"), 32);
  EXPECT_TRUE(doc.at("hyperparameters").at("batch_size").is_number_integer());
}

TEST(ManifestJson, OptionalKeysMayBeAbsent) {
  const auto m = manifest_from_json(
      R"({"run_id":"a","model_name":"b","dataset_name":"c","snapshots":["x","y"]})");
  EXPECT_FALSE(m.taxonomy_rules.has_value());
  EXPECT_TRUE(m.hyperparameters.empty());
  EXPECT_EQ(m.snapshots.size(), 2u);
}

TEST(ManifestJson, RuleWithoutPriorityDefaultsToZero) {
  const auto m = manifest_from_json(
      R"({"run_id":"a","model_name":"b","dataset_name":"c","snapshots":[],
          "taxonomy_rules":[{"group":"g","pattern":"p"}]})");
  ASSERT_TRUE(m.taxonomy_rules);
  EXPECT_EQ((*m.taxonomy_rules)[0].priority, 0);
}

TEST(ManifestJson, MalformedInputsRejected) {
  EXPECT_ERROR_KIND(manifest_from_json("{"), ErrorKind::InvalidManifest);
  EXPECT_ERROR_KIND(manifest_from_json("[]"), ErrorKind::InvalidManifest);
  EXPECT_ERROR_KIND(manifest_from_json(R"({"run_id":1,"model_name":"b","dataset_name":"c","snapshots":[]})"),
                    ErrorKind::InvalidManifest);
  EXPECT_ERROR_KIND(manifest_from_json(R"({"run_id":"a","model_name":"b","dataset_name":"c","snapshots":"x"})"),
                    ErrorKind::InvalidManifest);
  EXPECT_ERROR_KIND(manifest_from_json(R"({"run_id":"a","model_name":"b","dataset_name":"c","snapshots":[],
                                          "hyperparameters":{"x":[1]}})"),
                    ErrorKind::InvalidManifest);
}

TEST(ManifestFile, WriteThenRead) {
  TempDir dir;
  write_manifest(full_manifest(), dir / "manifest.json");
  EXPECT_EQ(read_manifest(dir / "manifest.json"), full_manifest());
  EXPECT_ERROR_KIND(read_manifest(dir / "absent.json"), ErrorKind::Io);
}

TEST(LoadRun, ThreeConsistentSnapshots) {
  TempDir dir;
  const auto path = write_run(dir.path(), three_consistent());
  const auto run = load_run(path);
  ASSERT_EQ(run.snapshots.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(run.snapshots[i], three_consistent()[i]);
}

TEST(LoadRun, ManifestOrderIsPreserved) {
  TempDir dir;
  auto snaps = three_consistent();
  write_run(dir.path(), snaps);
  auto m = read_manifest(dir / "manifest.json");
  std::swap(m.snapshots[0], m.snapshots[2]);
  EXPECT_ERROR_KIND(load_run(m, dir.path()), ErrorKind::EpochOrder);
}

TEST(LoadRun, ShapeMismatchNamesLayerAndEpochs) {
  TempDir dir;
  const std::vector<WeightSnapshot> snaps{
      one_layer(0, "conv1", {3, 3}, std::vector<double>(9, 1.0)),
      one_layer(1, "conv1", {3, 4}, std::vector<double>(12, 1.0))};
  const auto path = write_run(dir.path(), snaps);
  try {
    load_run(path);
    FAIL() << "expected ShapeMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("conv1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("epoch 0"), std::string::npos) << msg;
    EXPECT_NE(msg.find("epoch 1"), std::string::npos) << msg;
  }
}

TEST(LoadRun, SingleSnapshotRejected) {
  TempDir dir;
  const auto path = write_run(dir.path(), {three_consistent()[0]});
  try {
    load_run(path);
    FAIL() << "expected TooFewSnapshots";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooFewSnapshots);
    EXPECT_NE(std::string(e.what()).find("\xE2\x89\xA5" "2 snapshots required"), std::string::npos);
  }
}

TEST(LoadRun, MissingFileIsIoError) {
  TempDir dir;
  const auto path = write_run(dir.path(), three_consistent());
  std::filesystem::remove(dir / "epoch_1.wsnp");
  EXPECT_ERROR_KIND(load_run(path), ErrorKind::Io);
}

TEST(ValidateRun, MissingLayer) {
  auto snaps = three_consistent();
  snaps[1].layers.push_back({"extra", DType::F64, {1}, {1.0}});
  EXPECT_ERROR_KIND(validate_run(snaps), ErrorKind::MissingLayer);
  snaps = three_consistent();
  snaps[2].layers[0].name = "renamed";
  EXPECT_ERROR_KIND(validate_run(snaps), ErrorKind::MissingLayer);
}

TEST(ValidateRun, LayerOrderMustMatch) {
  std::vector<WeightSnapshot> snaps(2);
  for (std::uint32_t e = 0; e < 2; ++e) {
    snaps[e].epoch_index = e;
    snaps[e].layers = {{"a", DType::F64, {1}, {1.0}}, {"b", DType::F64, {1}, {1.0}}};
  }
  std::swap(snaps[1].layers[0], snaps[1].layers[1]);
  EXPECT_ERROR_KIND(validate_run(snaps), ErrorKind::LayerOrderMismatch);
}

TEST(ValidateRun, EpochsMustIncrease) {
  auto snaps = three_consistent();
  snaps[2].epoch_index = 1;
  EXPECT_ERROR_KIND(validate_run(snaps), ErrorKind::EpochOrder);
}
