#include "rwcscope/taxonomy.hpp"

#include <algorithm>

#include "rwcscope/error.hpp"

namespace rwcscope {

Taxonomy::Taxonomy(std::vector<TaxonomyRule> rules) : rules_(std::move(rules)) {
  std::stable_sort(rules_.begin(), rules_.end(),
                   [](const auto& a, const auto& b) { return a.priority < b.priority; });
  compiled_.reserve(rules_.size());
  for (const auto& rule : rules_) {
    if (rule.group.empty()) {
      fail(ErrorKind::InvalidPattern, "taxonomy rule '" + rule.pattern + "' has an empty group");
    }
    try {
      compiled_.emplace_back(rule.pattern, std::regex::ECMAScript | std::regex::optimize);
    } catch (const std::regex_error& e) {
      fail(ErrorKind::InvalidPattern,
           "taxonomy pattern '" + rule.pattern + "' does not compile: " + e.what());
    }
  }
}

std::string Taxonomy::classify(std::string_view layer_name) const {
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    if (std::regex_search(layer_name.begin(), layer_name.end(), compiled_[i])) {
      return rules_[i].group;
    }
  }
  return std::string(kOtherGroup);
}

std::map<std::string, std::string> assign_groups(const std::vector<std::string>& layer_names,
                                                 const std::vector<TaxonomyRule>& rules) {
  const Taxonomy taxonomy(rules);
  std::map<std::string, std::string> grouping;
  for (const auto& name : layer_names) grouping[name] = taxonomy.classify(name);
  return grouping;
}

std::map<std::string, RwcMatrix> split_matrix(const RwcMatrix& matrix,
                                              const std::map<std::string, std::string>& grouping) {
  std::map<std::string, std::vector<std::size_t>> rows_by_group;
  for (std::size_t r = 0; r < matrix.layer_names.size(); ++r) {
    auto it = grouping.find(matrix.layer_names[r]);
    if (it == grouping.end()) {
      fail(ErrorKind::UnknownLayer, "layer '" + matrix.layer_names[r] + "' has no group");
    }
    rows_by_group[it->second].push_back(r);
  }

  std::map<std::string, RwcMatrix> out;
  for (const auto& [group, rows] : rows_by_group) {
    out.emplace(group, matrix.select_rows(rows));
  }
  return out;
}

std::vector<TaxonomyRule> efficientnet_rules() {
  return {
      {"squeeze_excitation", R"((^|\.)se\.|conv_reduce|conv_expand)", 0},
      {"pointwise_linear", R"(conv_pwl)", 1},
      {"depthwise", R"(conv_dw|depthwise)", 2},
      {"pointwise", R"(conv_pw|pointwise)", 3},
  };
}

std::vector<TaxonomyRule> resnet_rules() {
  return {
      {"stem", R"(^(conv1|bn1)\.)", 0},
      {"block1", R"(^layer1\.)", 0},
      {"block2", R"(^layer2\.)", 0},
      {"block3", R"(^layer3\.)", 0},
      {"block4", R"(^layer4\.)", 0},
      {"head", R"(^fc\.)", 0},
  };
}

}  // namespace rwcscope
