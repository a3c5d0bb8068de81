#pragma once

#include <map>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "rwcscope/rwc.hpp"

namespace rwcscope {

/// Maps layer names matching `pattern` to `group`. Lower priority wins when
/// several rules match; equal priorities resolve to the earlier rule.
struct TaxonomyRule {
  std::string group;
  std::string pattern;
  int priority = 0;

  friend bool operator==(const TaxonomyRule&, const TaxonomyRule&) = default;
};

inline constexpr std::string_view kOtherGroup = "other";

/// Compiled rule list. Patterns are ECMAScript regexes searched anywhere in
/// the layer name; anchor them with ^...$ for whole-name matches.
class Taxonomy {
 public:
  /// Throws Error(InvalidPattern) for empty group names or bad regexes.
  explicit Taxonomy(std::vector<TaxonomyRule> rules);

  /// Group for one layer name, or "other" when nothing matches.
  std::string classify(std::string_view layer_name) const;

  const std::vector<TaxonomyRule>& rules() const noexcept { return rules_; }

 private:
  std::vector<TaxonomyRule> rules_;  // stable-sorted by priority
  std::vector<std::regex> compiled_;
};

std::map<std::string, std::string> assign_groups(const std::vector<std::string>& layer_names,
                                                 const std::vector<TaxonomyRule>& rules);

/// Partitions matrix rows by group, preserving row order inside each group.
/// Throws Error(UnknownLayer) when a matrix layer is missing from `grouping`.
std::map<std::string, RwcMatrix> split_matrix(const RwcMatrix& matrix,
                                              const std::map<std::string, std::string>& grouping);

/// Example rule set for timm-style EfficientNet parameter names, covering the
/// four MBConv primitive families: depthwise, pointwise, squeeze-and-excitation
/// and pointwise-linear projection.
std::vector<TaxonomyRule> efficientnet_rules();

/// Example rule set for torchvision-style ResNet names (stem, layer1..4, head).
std::vector<TaxonomyRule> resnet_rules();

}  // namespace rwcscope
