#include "rwcscope/rwc.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rwcscope/error.hpp"
#include "rwcscope/format.hpp"
#include "rwcscope/parallel.hpp"

namespace rwcscope {

namespace {

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
};

Moments population_moments(std::span<const double> xs) {
  Moments m;
  if (xs.empty()) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  double sq = 0.0;
  for (double x : xs) sq += (x - m.mean) * (x - m.mean);
  m.stddev = std::sqrt(sq / static_cast<double>(xs.size()));
  return m;
}

void clamp_span(std::span<double> xs, const Moments& m, double multiplier) {
  const double limit = multiplier * m.stddev;
  for (double& x : xs) {
    if (std::abs(x - m.mean) > limit) x = m.mean;
  }
}

// Splits one CSV line on commas; layer names are quoted when they need it.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

}  // namespace

RwcMatrix RwcMatrix::select_rows(std::span<const std::size_t> rows) const {
  RwcMatrix out;
  out.values = Matrix(rows.size(), transition_count());
  out.layer_names.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.layer_names.push_back(layer_names.at(rows[i]));
    auto src = values.row(rows[i]);
    std::copy(src.begin(), src.end(), out.values.row(i).begin());
  }
  return out;
}

double rwc_layer(std::span<const double> prev, std::span<const double> curr) {
  if (prev.size() != curr.size() || prev.empty()) {
    fail(ErrorKind::LengthMismatch, "rwc_layer needs equal non-empty inputs, got " +
                                        std::to_string(prev.size()) + " and " +
                                        std::to_string(curr.size()));
  }
  double diff = 0.0;
  double base = 0.0;
  for (std::size_t i = 0; i < prev.size(); ++i) {
    diff += std::abs(curr[i] - prev[i]);
    base += std::abs(prev[i]);
  }
  if (base == 0.0) fail(ErrorKind::ZeroDenominator, "previous weights have zero L1 norm");
  return diff / base;
}

RwcMatrix build_rwc_matrix(std::span<const WeightSnapshot> snapshots, std::size_t min_params) {
  if (snapshots.size() < 2) {
    fail(ErrorKind::TooFewSnapshots, "≥2 snapshots required");
  }
  const auto& first = snapshots.front().layers;

  std::vector<std::size_t> kept;
  for (std::size_t l = 0; l < first.size(); ++l) {
    if (first[l].values.size() >= min_params) kept.push_back(l);
  }
  if (kept.empty()) {
    fail(ErrorKind::NoLayersRemaining,
         "no layer has at least " + std::to_string(min_params) + " parameters");
  }

  const std::size_t transitions = snapshots.size() - 1;
  RwcMatrix out;
  out.values = Matrix(kept.size(), transitions);
  for (auto l : kept) out.layer_names.push_back(first[l].name);

  parallel_for(kept.size(), [&](std::size_t row) {
    const std::size_t l = kept[row];
    for (std::size_t t = 0; t < transitions; ++t) {
      const auto& prev = snapshots[t].layers[l];
      const auto& curr = snapshots[t + 1].layers[l];
      try {
        out.values(row, t) = rwc_layer(prev.values, curr.values);
      } catch (const Error& e) {
        throw Error(e.kind(), "layer '" + prev.name + "', transition " + std::to_string(t) +
                                  " (epoch " + std::to_string(snapshots[t].epoch_index) + " -> " +
                                  std::to_string(snapshots[t + 1].epoch_index) + "): " + e.what());
      }
    }
  });
  return out;
}

RwcMatrix clamp_outliers(const RwcMatrix& matrix, const ClampConfig& config) {
  if (!(config.multiplier > 0.0)) {
    fail(ErrorKind::InvalidArgument, "clamp multiplier must be positive");
  }
  RwcMatrix out = matrix;
  if (!config.enabled) return out;

  if (config.scope == ClampScope::Global) {
    const auto m = population_moments(matrix.values.data());
    clamp_span(out.values.data(), m, config.multiplier);
  } else {
    for (std::size_t r = 0; r < out.values.rows(); ++r) {
      const auto m = population_moments(matrix.values.row(r));
      clamp_span(out.values.row(r), m, config.multiplier);
    }
  }
  return out;
}

void write_rwc_csv(const RwcMatrix& matrix, std::ostream& out) {
  out << "layer";
  for (std::size_t t = 0; t < matrix.transition_count(); ++t) out << ",t" << t;
  out << '\n';
  for (std::size_t r = 0; r < matrix.layer_count(); ++r) {
    out << csv_field(matrix.layer_names[r]);
    for (double v : matrix.values.row(r)) out << ',' << format_real(v);
    out << '\n';
  }
}

void write_rwc_csv(const RwcMatrix& matrix, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  write_rwc_csv(matrix, out);
  if (!out) fail(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

RwcMatrix read_rwc_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Malformed, "empty RWC CSV");
  const auto header = split_csv_line(line);
  if (header.empty() || header.front() != "layer") {
    fail(ErrorKind::Malformed, "RWC CSV header must start with 'layer'");
  }
  const std::size_t transitions = header.size() - 1;

  std::vector<std::string> names;
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      fail(ErrorKind::Malformed, "RWC CSV row has " + std::to_string(fields.size()) +
                                     " fields, expected " + std::to_string(header.size()));
    }
    names.push_back(fields[0]);
    for (std::size_t i = 1; i < fields.size(); ++i) values.push_back(parse_real(fields[i]));
  }

  RwcMatrix out;
  out.values = Matrix(names.size(), transitions);
  std::copy(values.begin(), values.end(), out.values.data().begin());
  out.layer_names = std::move(names);
  return out;
}

RwcMatrix read_rwc_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "'");
  return read_rwc_csv(in);
}

}  // namespace rwcscope
