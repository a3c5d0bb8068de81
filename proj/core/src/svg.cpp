#include "rwcscope/svg.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rwcscope/error.hpp"
#include "rwcscope/format.hpp"

namespace rwcscope {

namespace {

using F = PlotFrame;

std::string coord(double v) { return format_fixed(v, 2); }

std::string tick_label(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 3);
  return std::string(buf.data(), end);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) fail(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

void open_svg(std::ostringstream& s, std::string_view title) {
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << coord(F::kWidth)
    << "\" height=\"" << coord(F::kHeight) << "\" viewBox=\"0 0 " << coord(F::kWidth) << ' '
    << coord(F::kHeight) << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
    << "<rect x=\"0\" y=\"0\" width=\"" << coord(F::kWidth) << "\" height=\"" << coord(F::kHeight)
    << "\" fill=\"#ffffff\"/>\n";
  if (!title.empty()) {
    s << "<text class=\"title\" x=\"" << coord(F::kLeft + F::plot_width() / 2) << "\" y=\"24\""
      << " text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
  }
}

// Axes box, y ticks over [0, y_max], axis captions.
void draw_axes(std::ostringstream& s, double y_max, std::string_view x_caption,
               std::string_view y_caption) {
  const double x0 = F::kLeft;
  const double x1 = F::kLeft + F::plot_width();
  const double y0 = F::kTop + F::plot_height();
  const double y1 = F::kTop;
  s << "<g class=\"axes\" stroke=\"#000000\" stroke-width=\"1\">\n"
    << "<line x1=\"" << coord(x0) << "\" y1=\"" << coord(y0) << "\" x2=\"" << coord(x1)
    << "\" y2=\"" << coord(y0) << "\"/>\n"
    << "<line x1=\"" << coord(x0) << "\" y1=\"" << coord(y0) << "\" x2=\"" << coord(x0)
    << "\" y2=\"" << coord(y1) << "\"/>\n"
    << "</g>\n";
  s << "<g class=\"y-ticks\" text-anchor=\"end\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = y_max * i / 4.0;
    const double y = y0 - F::plot_height() * i / 4.0;
    s << "<line x1=\"" << coord(x0 - 4) << "\" y1=\"" << coord(y) << "\" x2=\"" << coord(x0)
      << "\" y2=\"" << coord(y) << "\" stroke=\"#000000\"/>"
      << "<text x=\"" << coord(x0 - 7) << "\" y=\"" << coord(y + 4) << "\">" << tick_label(v)
      << "</text>\n";
  }
  s << "</g>\n";
  s << "<text class=\"x-caption\" x=\"" << coord(F::kLeft + F::plot_width() / 2) << "\" y=\""
    << coord(F::kHeight - 15) << "\" text-anchor=\"middle\">" << xml_escape(x_caption)
    << "</text>\n";
  s << "<text class=\"y-caption\" transform=\"translate(18 "
    << coord(F::kTop + F::plot_height() / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << xml_escape(y_caption) << "</text>\n";
}

double y_of(double v, double y_max) {
  return F::kTop + F::plot_height() * (1.0 - v / y_max);
}

void draw_legend(std::ostringstream& s, const ClusterModel& model) {
  std::vector<std::size_t> sizes(model.k, 0);
  for (auto a : model.assignments) ++sizes.at(a);
  const double x = F::kLeft + F::plot_width() + 20;
  s << "<g class=\"legend\">\n";
  for (std::size_t c = 0; c < model.k; ++c) {
    const double y = F::kTop + 10 + 18.0 * static_cast<double>(c);
    s << "<g class=\"legend-entry\" data-cluster=\"" << c << "\">"
      << "<line x1=\"" << coord(x) << "\" y1=\"" << coord(y) << "\" x2=\"" << coord(x + 20)
      << "\" y2=\"" << coord(y) << "\" stroke=\"" << cluster_color(c) << "\" stroke-width=\"3\"/>"
      << "<text x=\"" << coord(x + 26) << "\" y=\"" << coord(y + 4) << "\">cluster " << c << " ("
      << sizes[c] << (sizes[c] == 1 ? " layer" : " layers") << ")</text></g>\n";
  }
  s << "</g>\n";
}

}  // namespace

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string cluster_curves_svg(const RwcMatrix& matrix, const ClusterModel& model,
                               std::string_view title) {
  if (model.assignments.size() != matrix.layer_count()) {
    fail(ErrorKind::DimensionMismatch, "cluster assignments do not match the matrix rows");
  }
  const std::size_t transitions = matrix.transition_count();
  double y_max = 0.0;
  for (double v : matrix.values.data()) y_max = std::max(y_max, v);
  if (!(y_max > 0.0)) y_max = 1.0;

  auto x_of = [&](std::size_t t) {
    if (transitions <= 1) return F::kLeft + F::plot_width() / 2;
    return F::kLeft + F::plot_width() * static_cast<double>(t) /
                          static_cast<double>(transitions - 1);
  };

  std::ostringstream s;
  open_svg(s, title);
  draw_axes(s, y_max, "epoch", "relative weight change");

  const std::size_t stride = std::max<std::size_t>(1, (transitions + 24) / 25);
  s << "<g class=\"x-ticks\" text-anchor=\"middle\">\n";
  for (std::size_t t = 0; t < transitions; t += stride) {
    const double x = x_of(t);
    const double y = F::kTop + F::plot_height();
    s << "<line x1=\"" << coord(x) << "\" y1=\"" << coord(y) << "\" x2=\"" << coord(x)
      << "\" y2=\"" << coord(y + 4) << "\" stroke=\"#000000\"/>"
      << "<text x=\"" << coord(x) << "\" y=\"" << coord(y + 16) << "\">" << (t + 1)
      << "</text>\n";
  }
  s << "</g>\n";

  s << "<g class=\"curves\" fill=\"none\" stroke-width=\"1.2\">\n";
  for (std::size_t r = 0; r < matrix.layer_count(); ++r) {
    const auto cluster = model.assignments[r];
    s << "<polyline class=\"layer-curve\" data-layer=\"" << xml_escape(matrix.layer_names[r])
      << "\" data-cluster=\"" << cluster << "\" stroke=\"" << cluster_color(cluster)
      << "\" points=\"";
    for (std::size_t t = 0; t < transitions; ++t) {
      if (t) s << ' ';
      s << coord(x_of(t)) << ',' << coord(y_of(matrix.values(r, t), y_max));
    }
    s << "\"><title>" << xml_escape(matrix.layer_names[r]) << "</title></polyline>\n";
  }
  s << "</g>\n";
  draw_legend(s, model);
  s << "</svg>\n";
  return s.str();
}

void render_cluster_curves(const RwcMatrix& matrix, const ClusterModel& model,
                           const std::filesystem::path& out, std::string_view title) {
  write_text_file(out, cluster_curves_svg(matrix, model, title));
}

double scree_x(const ScreeCurve& curve, std::size_t k) {
  if (curve.ks.empty()) fail(ErrorKind::InvalidCurve, "empty scree curve");
  const double lo = static_cast<double>(curve.ks.front());
  const double hi = static_cast<double>(curve.ks.back());
  if (hi == lo) return F::kLeft + F::plot_width() / 2;
  return F::kLeft + F::plot_width() * (static_cast<double>(k) - lo) / (hi - lo);
}

std::string scree_svg(const ScreeCurve& curve, std::string_view title) {
  if (curve.ks.empty()) fail(ErrorKind::InvalidCurve, "empty scree curve");
  if (curve.ks.size() != curve.inertias.size()) {
    fail(ErrorKind::InvalidCurve, "scree curve has mismatched ks and inertias");
  }
  auto chosen = std::find(curve.ks.begin(), curve.ks.end(), curve.chosen_k);
  if (chosen == curve.ks.end()) fail(ErrorKind::InvalidCurve, "chosen_k is not a candidate K");

  double y_max = 0.0;
  for (double v : curve.inertias) y_max = std::max(y_max, v);
  if (!(y_max > 0.0)) y_max = 1.0;

  std::ostringstream s;
  open_svg(s, title);
  draw_axes(s, y_max, "number of clusters K", "inertia");

  s << "<g class=\"x-ticks\" text-anchor=\"middle\">\n";
  for (auto k : curve.ks) {
    const double x = scree_x(curve, k);
    const double y = F::kTop + F::plot_height();
    s << "<line x1=\"" << coord(x) << "\" y1=\"" << coord(y) << "\" x2=\"" << coord(x)
      << "\" y2=\"" << coord(y + 4) << "\" stroke=\"#000000\"/>"
      << "<text x=\"" << coord(x) << "\" y=\"" << coord(y + 16) << "\">" << k << "</text>\n";
  }
  s << "</g>\n";

  s << "<polyline class=\"scree-line\" fill=\"none\" stroke=\"" << cluster_color(0)
    << "\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < curve.ks.size(); ++i) {
    if (i) s << ' ';
    s << coord(scree_x(curve, curve.ks[i])) << ',' << coord(y_of(curve.inertias[i], y_max));
  }
  s << "\"/>\n";

  s << "<g class=\"scree-points\" fill=\"" << cluster_color(0) << "\">\n";
  for (std::size_t i = 0; i < curve.ks.size(); ++i) {
    s << "<circle class=\"scree-point\" data-k=\"" << curve.ks[i] << "\" cx=\""
      << coord(scree_x(curve, curve.ks[i])) << "\" cy=\""
      << coord(y_of(curve.inertias[i], y_max)) << "\" r=\"4\"/>\n";
  }
  s << "</g>\n";

  const auto idx = static_cast<std::size_t>(chosen - curve.ks.begin());
  const double cx = scree_x(curve, curve.chosen_k);
  const double cy = y_of(curve.inertias[idx], y_max);
  s << "<circle class=\"chosen-k\" data-k=\"" << curve.chosen_k << "\" cx=\"" << coord(cx)
    << "\" cy=\"" << coord(cy) << "\" r=\"9\" fill=\"none\" stroke=\"" << cluster_color(3)
    << "\" stroke-width=\"2\"/>\n"
    << "<text class=\"chosen-label\" x=\"" << coord(cx + 12) << "\" y=\"" << coord(cy - 12)
    << "\">K = " << curve.chosen_k << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

void render_scree(const ScreeCurve& curve, const std::filesystem::path& out,
                  std::string_view title) {
  write_text_file(out, scree_svg(curve, title));
}

std::string pca_scatter_svg(const Matrix& scores, const std::vector<std::string>& layer_names,
                            const ClusterModel& model, std::string_view title) {
  if (scores.rows() != model.assignments.size() || scores.rows() != layer_names.size() ||
      scores.cols() == 0) {
    fail(ErrorKind::DimensionMismatch, "PCA scores do not match the cluster model");
  }
  auto component = [&](std::size_t r, std::size_t c) {
    return c < scores.cols() ? scores(r, c) : 0.0;
  };
  double lo[2] = {0.0, 0.0};
  double hi[2] = {0.0, 0.0};
  for (std::size_t r = 0; r < scores.rows(); ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      lo[c] = std::min(lo[c], component(r, c));
      hi[c] = std::max(hi[c], component(r, c));
    }
  }
  for (std::size_t c = 0; c < 2; ++c) {
    const double pad = std::max(1e-12, 0.05 * (hi[c] - lo[c]));
    lo[c] -= pad;
    hi[c] += pad;
  }
  auto px = [&](double v) { return F::kLeft + F::plot_width() * (v - lo[0]) / (hi[0] - lo[0]); };
  auto py = [&](double v) {
    return F::kTop + F::plot_height() * (1.0 - (v - lo[1]) / (hi[1] - lo[1]));
  };

  std::ostringstream s;
  open_svg(s, title);
  s << "<rect class=\"frame\" x=\"" << coord(F::kLeft) << "\" y=\"" << coord(F::kTop)
    << "\" width=\"" << coord(F::plot_width()) << "\" height=\"" << coord(F::plot_height())
    << "\" fill=\"none\" stroke=\"#000000\"/>\n";
  s << "<text class=\"x-caption\" x=\"" << coord(F::kLeft + F::plot_width() / 2) << "\" y=\""
    << coord(F::kHeight - 15) << "\" text-anchor=\"middle\">pc1 [" << tick_label(lo[0]) << ", "
    << tick_label(hi[0]) << "]</text>\n";
  s << "<text class=\"y-caption\" transform=\"translate(18 "
    << coord(F::kTop + F::plot_height() / 2) << ") rotate(-90)\" text-anchor=\"middle\">pc2 ["
    << tick_label(lo[1]) << ", " << tick_label(hi[1]) << "]</text>\n";
  s << "<g class=\"pca-points\">\n";
  for (std::size_t r = 0; r < scores.rows(); ++r) {
    const auto c = model.assignments[r];
    s << "<circle class=\"pca-point\" data-layer=\"" << xml_escape(layer_names[r])
      << "\" data-cluster=\"" << c << "\" cx=\"" << coord(px(component(r, 0))) << "\" cy=\""
      << coord(py(component(r, 1))) << "\" r=\"4\" fill=\"" << cluster_color(c)
      << "\"><title>" << xml_escape(layer_names[r]) << "</title></circle>\n";
  }
  s << "</g>\n";
  draw_legend(s, model);
  s << "</svg>\n";
  return s.str();
}

}  // namespace rwcscope
