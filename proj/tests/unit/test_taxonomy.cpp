#include <gtest/gtest.h>

#include <set>

#include "expect_error.hpp"
#include "rwcscope/random.hpp"
#include "rwcscope/taxonomy.hpp"

using namespace rwcscope;

namespace {

RwcMatrix four_layers() {
  RwcMatrix m;
  m.layer_names = {"a", "b", "c", "d"};
  m.values = Matrix(4, 3);
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t t = 0; t < 3; ++t) m.values(r, t) = static_cast<double>(10 * r + t);
  }
  return m;
}

}  // namespace

TEST(AssignGroups, DirectMatchAndFallback) {
  const auto g = assign_groups({"blocks.0.depthwise_conv", "fc"}, {{"depthwise", ".*depthwise.*", 0}});
  EXPECT_EQ(g.at("blocks.0.depthwise_conv"), "depthwise");
  EXPECT_EQ(g.at("fc"), "other");
}

TEST(AssignGroups, LowerPriorityWins) {
  const std::vector<TaxonomyRule> rules{{"second", "conv", 1}, {"first", "conv", 0}};
  EXPECT_EQ(assign_groups({"conv1"}, rules).at("conv1"), "first");
}

TEST(AssignGroups, EqualPriorityResolvesToEarlierRule) {
  const std::vector<TaxonomyRule> rules{{"x", "conv", 0}, {"y", "conv", 0}};
  EXPECT_EQ(assign_groups({"conv1"}, rules).at("conv1"), "x");
}

TEST(AssignGroups, EmptyRulesMapEverythingToOther) {
  const auto g = assign_groups({"a", "b"}, {});
  EXPECT_EQ(g.at("a"), "other");
  EXPECT_EQ(g.at("b"), "other");
}

TEST(AssignGroups, PatternsSearchAnywhereInName) {
  const auto g = assign_groups({"features.3.conv_pw.weight"}, {{"pw", "conv_pw", 0}});
  EXPECT_EQ(g.at("features.3.conv_pw.weight"), "pw");
}

TEST(Taxonomy, InvalidRulesRejected) {
  EXPECT_ERROR_KIND(Taxonomy({{"g", "([", 0}}), ErrorKind::InvalidPattern);
  EXPECT_ERROR_KIND(Taxonomy({{"", "x", 0}}), ErrorKind::InvalidPattern);
}

TEST(Taxonomy, EfficientNetPresets) {
  const Taxonomy t(efficientnet_rules());
  EXPECT_EQ(t.classify("blocks.1.0.conv_dw.weight"), "depthwise");
  EXPECT_EQ(t.classify("blocks.1.0.conv_pw.weight"), "pointwise");
  EXPECT_EQ(t.classify("blocks.1.0.conv_pwl.weight"), "pointwise_linear");
  EXPECT_EQ(t.classify("blocks.1.0.se.conv_reduce.weight"), "squeeze_excitation");
  EXPECT_EQ(t.classify("blocks.1.0.se.conv_expand.bias"), "squeeze_excitation");
  EXPECT_EQ(t.classify("conv_stem.weight"), "other");
  std::set<std::string> groups;
  for (const auto& r : efficientnet_rules()) groups.insert(r.group);
  EXPECT_EQ(groups.size(), 4u);
}

TEST(Taxonomy, ResNetPresets) {
  const Taxonomy t(resnet_rules());
  EXPECT_EQ(t.classify("conv1.weight"), "stem");
  EXPECT_EQ(t.classify("layer1.0.conv1.weight"), "block1");
  EXPECT_EQ(t.classify("layer4.2.bn3.bias"), "block4");
  EXPECT_EQ(t.classify("fc.weight"), "head");
}

TEST(SplitMatrix, SingleGroupIsIdentity) {
  const auto m = four_layers();
  const auto parts = split_matrix(m, assign_groups(m.layer_names, {}));
  ASSERT_EQ(parts.size(), 1u);
  EXPECT_EQ(parts.at("other"), m);
}

TEST(SplitMatrix, SingletonGroups) {
  const auto m = four_layers();
  std::map<std::string, std::string> grouping;
  for (const auto& name : m.layer_names) grouping[name] = "g_" + name;
  const auto parts = split_matrix(m, grouping);
  ASSERT_EQ(parts.size(), 4u);
  for (std::size_t r = 0; r < 4; ++r) {
    const auto& part = parts.at("g_" + m.layer_names[r]);
    ASSERT_EQ(part.layer_count(), 1u);
    EXPECT_EQ(part.values(0, 2), m.values(r, 2));
  }
}

TEST(SplitMatrix, TwoGroupsKeepOriginalOrder) {
  const auto m = four_layers();
  const auto parts = split_matrix(m, {{"a", "dw"}, {"b", "dw"}, {"c", "pw"}, {"d", "pw"}});
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_EQ(parts.at("dw").layer_names, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(parts.at("pw").layer_names, (std::vector<std::string>{"c", "d"}));
  EXPECT_EQ(parts.at("pw").values(1, 1), 31.0);
  EXPECT_EQ(parts.at("dw").values(0, 0), 0.0);
}

TEST(SplitMatrix, UnknownLayer) {
  const auto m = four_layers();
  EXPECT_ERROR_KIND(split_matrix(m, {{"a", "x"}, {"b", "x"}, {"c", "x"}}), ErrorKind::UnknownLayer);
}

TEST(SplitMatrix, RandomGroupingsPartitionRows) {
  Rng rng(70);
  for (int trial = 0; trial < 50; ++trial) {
    RwcMatrix m;
    const std::size_t n = 1 + uniform_index(rng, 20);
    m.values = Matrix(n, 2);
    std::map<std::string, std::string> grouping;
    for (std::size_t r = 0; r < n; ++r) {
      m.layer_names.push_back("layer" + std::to_string(r));
      m.values(r, 0) = static_cast<double>(r);
      grouping[m.layer_names.back()] = "g" + std::to_string(uniform_index(rng, 4));
    }
    const auto parts = split_matrix(m, grouping);
    std::multiset<std::string> seen;
    for (const auto& [group, part] : parts) {
      for (std::size_t r = 0; r < part.layer_count(); ++r) {
        seen.insert(part.layer_names[r]);
        EXPECT_EQ(grouping.at(part.layer_names[r]), group);
        if (r > 0) {
          EXPECT_LT(part.values(r - 1, 0), part.values(r, 0));
        }
      }
    }
    EXPECT_EQ(seen, std::multiset<std::string>(m.layer_names.begin(), m.layer_names.end()));
  }
}
