#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "rwcscope/pipeline.hpp"

using namespace rwcscope;
using rwcscope::testing::make_trend_families;

TEST(AnalyzeMatrix, RecoversThreeTrendFamilies) {
  const auto fam = make_trend_families(1);
  const auto report = analyze_matrix(fam.matrix, std::nullopt, {});
  ASSERT_EQ(report.groups.size(), 1u);
  const auto& g = report.groups[0];
  EXPECT_EQ(g.name, "all");
  EXPECT_EQ(g.clusters.k, 3u);
  EXPECT_EQ(g.scree->chosen_k, 3u);
  EXPECT_GE(adjusted_rand_index(g.clusters.assignments, fam.truth), 0.9);
}

TEST(AnalyzeMatrix, Pca2SpaceAlsoRecoversFamilies) {
  const auto fam = make_trend_families(2);
  AnalysisConfig config;
  config.cluster_space = ClusterSpace::Pca2;
  const auto report = analyze_matrix(fam.matrix, std::nullopt, config);
  const auto& g = report.groups[0];
  EXPECT_EQ(g.cluster_space, "pca2");
  EXPECT_EQ(g.clusters.centroids.cols(), 2u);
  EXPECT_EQ(g.clusters.k, 3u);
}

TEST(AnalyzeMatrix, ExplicitK) {
  const auto fam = make_trend_families(3);
  AnalysisConfig config;
  config.k = 1;
  const auto report = analyze_matrix(fam.matrix, std::nullopt, config);
  const auto& g = report.groups[0];
  EXPECT_FALSE(g.k_auto);
  EXPECT_EQ(g.clusters.k, 1u);
  ASSERT_TRUE(g.scree);
  EXPECT_EQ(g.scree->chosen_k, 1u);
}

TEST(AnalyzeMatrix, KLargerThanGroupFails) {
  const auto fam = make_trend_families(4, 6, 5);
  AnalysisConfig config;
  config.k = 7;
  config.k_max = 10;
  EXPECT_ERROR_KIND(analyze_matrix(fam.matrix, std::nullopt, config), ErrorKind::KTooLarge);
}

TEST(AnalyzeMatrix, ClampsBeforeClustering) {
  RwcMatrix raw;
  raw.layer_names = {"a", "b", "c"};
  raw.values = Matrix(3, 10, 1.0);
  raw.values(0, 9) = 21.0;
  raw.values(1, 0) = 2.0;
  const auto report = analyze_matrix(raw, std::nullopt, {});
  EXPECT_EQ(report.raw_rwc.values(0, 9), 21.0);
  EXPECT_EQ(report.rwc.values(0, 9), 3.0);
  EXPECT_EQ(report.groups[0].matrix.values(0, 9), 3.0);
}

TEST(AnalyzeMatrix, SingleLayerGroupHasNoScreeOrPca) {
  RwcMatrix raw;
  raw.layer_names = {"solo.weight", "x.0", "x.1"};
  raw.values = Matrix(3, 4);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t t = 0; t < 4; ++t) raw.values(r, t) = 0.1 * static_cast<double>(r + t + 1);
  }
  const auto report = analyze_matrix(raw, std::vector<TaxonomyRule>{{"solo", "^solo", 0}}, {});
  ASSERT_EQ(report.groups.size(), 2u);
  const auto& solo = report.groups[1].name == "solo" ? report.groups[1] : report.groups[0];
  EXPECT_EQ(solo.clusters.k, 1u);
  EXPECT_FALSE(solo.scree);
  EXPECT_FALSE(solo.pca);
}

TEST(AnalyzeMatrix, ScreeBoundedByDistinctRows) {
  RwcMatrix raw;
  raw.layer_names = {"a", "b", "c", "d"};
  raw.values = Matrix(4, 3, 0.1);
  raw.values(2, 0) = 0.2;
  raw.values(3, 0) = 0.2;
  const auto report = analyze_matrix(raw, std::nullopt, {});
  ASSERT_TRUE(report.groups[0].scree);
  EXPECT_EQ(report.groups[0].scree->ks.back(), 2u);
}

TEST(AnalyzeMatrix, SettingsAndDeterminism) {
  const auto fam = make_trend_families(5);
  const auto a = analyze_matrix(fam.matrix, std::nullopt, {});
  const auto b = analyze_matrix(fam.matrix, std::nullopt, {});
  EXPECT_EQ(a.groups[0].clusters.assignments, b.groups[0].clusters.assignments);
  EXPECT_EQ(a.groups[0].scree->inertias, b.groups[0].scree->inertias);
  EXPECT_EQ(std::get<std::string>(a.settings.at("k")), "auto");
  EXPECT_EQ(std::get<std::int64_t>(a.settings.at("seed")), 42);
}

TEST(ValidateConfig, RejectsBadValues) {
  AnalysisConfig c;
  c.k_max = 1;
  EXPECT_ERROR_KIND(validate_config(c), ErrorKind::InvalidArgument);
  c = {};
  c.k = 11;
  EXPECT_ERROR_KIND(validate_config(c), ErrorKind::InvalidArgument);
  c = {};
  c.n_init = 0;
  EXPECT_ERROR_KIND(validate_config(c), ErrorKind::InvalidArgument);
  c = {};
  c.clamp.multiplier = -1;
  EXPECT_ERROR_KIND(validate_config(c), ErrorKind::InvalidArgument);
}

TEST(AnalyzeRun, EndToEndFromSnapshots) {
  rwcscope::testing::TempDir dir;
  const auto fam = make_trend_families(6);
  const auto path = rwcscope::testing::write_run(dir.path(), rwcscope::testing::snapshots_with_rwc(fam.matrix));
  const auto run = load_run(path);
  const auto raw = build_rwc_matrix(run.snapshots);
  for (std::size_t i = 0; i < raw.values.data().size(); ++i) {
    EXPECT_NEAR(raw.values.data()[i], fam.matrix.values.data()[i], 1e-12);
  }
  const auto report = analyze_run(run, {});
  EXPECT_EQ(report.run_id, "test-run");
  EXPECT_EQ(report.groups[0].clusters.k, 3u);
}

TEST(LateLayerShare, DefinedMetric) {
  RwcMatrix m;
  m.layer_names = {"l0", "l1", "l2", "l3"};
  m.values = Matrix(4, 2);
  const double col0[] = {1, 1, 1, 1};
  const double col1[] = {3, 1, 0, 0};
  for (std::size_t r = 0; r < 4; ++r) {
    m.values(r, 0) = col0[r];
    m.values(r, 1) = col1[r];
  }
  const auto share = late_layer_share(m, 0.5);
  EXPECT_EQ(share.late_layers, (std::vector<std::string>{"l2", "l3"}));
  EXPECT_EQ(share.per_transition, (std::vector<double>{0.5, 0.0}));
  EXPECT_EQ(share.mean, 0.25);
  EXPECT_EQ(late_layer_share(m, 0.1).late_layers, (std::vector<std::string>{"l3"}));
  EXPECT_ERROR_KIND(late_layer_share(m, 0.0), ErrorKind::InvalidArgument);
}
