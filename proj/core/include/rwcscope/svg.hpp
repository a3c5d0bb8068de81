#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

#include "rwcscope/kmeans.hpp"
#include "rwcscope/pca.hpp"
#include "rwcscope/rwc.hpp"

namespace rwcscope {

/// Stroke colors by cluster id (id modulo 10).
inline constexpr std::array<std::string_view, 10> kClusterPalette{
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

inline std::string_view cluster_color(std::size_t cluster) {
  return kClusterPalette[cluster % kClusterPalette.size()];
}

/// Plot frame shared by every chart: 800x480 canvas, plot area inset by the
/// margins below, legend to the right of the plot area.
struct PlotFrame {
  static constexpr double kWidth = 800.0;
  static constexpr double kHeight = 480.0;
  static constexpr double kLeft = 80.0;
  static constexpr double kRight = 170.0;
  static constexpr double kTop = 40.0;
  static constexpr double kBottom = 60.0;
  static constexpr double plot_width() { return kWidth - kLeft - kRight; }
  static constexpr double plot_height() { return kHeight - kTop - kBottom; }
};

/// One polyline per layer colored by its cluster, epoch ticks on x, RWC on y
/// (linear, 0 to the matrix maximum), and one legend entry per cluster.
std::string cluster_curves_svg(const RwcMatrix& matrix, const ClusterModel& model,
                               std::string_view title = {});
void render_cluster_curves(const RwcMatrix& matrix, const ClusterModel& model,
                           const std::filesystem::path& out, std::string_view title = {});

/// X coordinate of candidate K on the scree chart.
double scree_x(const ScreeCurve& curve, std::size_t k);

/// Inertia against K with a point per K, a connecting line and a ring marking
/// chosen_k. Throws InvalidCurve for empty or inconsistent curves.
std::string scree_svg(const ScreeCurve& curve, std::string_view title = {});
void render_scree(const ScreeCurve& curve, const std::filesystem::path& out,
                  std::string_view title = {});

/// PCA scores scatter (pc1 against pc2, or pc1 against 0) colored by cluster.
std::string pca_scatter_svg(const Matrix& scores, const std::vector<std::string>& layer_names,
                            const ClusterModel& model, std::string_view title = {});

std::string xml_escape(std::string_view text);

}  // namespace rwcscope
