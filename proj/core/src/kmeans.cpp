#include "rwcscope/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include "rwcscope/error.hpp"
#include "rwcscope/parallel.hpp"

namespace rwcscope {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void check_finite(const Matrix& points) {
  for (double v : points.data()) {
    if (!std::isfinite(v)) fail(ErrorKind::NonFinite, "clustering input has a non-finite value");
  }
}

struct LloydResult {
  Matrix centroids;
  std::vector<std::size_t> assignments;
  double inertia = 0.0;
  std::size_t iterations = 0;
};

class Lloyd {
 public:
  Lloyd(const Matrix& points, Matrix centroids)
      : points_(points), centroids_(std::move(centroids)), assignments_(points.rows(), 0) {}

  // Nearest-centroid assignment (lowest index on ties), then empty-cluster
  // repair. Returns the inertia of the resulting state.
  double assign() {
    const std::size_t k = centroids_.rows();
    for (std::size_t p = 0; p < points_.rows(); ++p) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_c = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const double d = squared_distance(points_.row(p), centroids_.row(c));
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      assignments_[p] = best_c;
    }
    repair_empty();
    return compute_inertia(points_, centroids_, assignments_);
  }

  // Moves every centroid to the mean of its points; returns the largest move.
  double update() {
    const std::size_t k = centroids_.rows();
    const std::size_t d = centroids_.cols();
    Matrix sums(k, d);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t p = 0; p < points_.rows(); ++p) {
      auto row = points_.row(p);
      auto dst = sums.row(assignments_[p]);
      for (std::size_t j = 0; j < d; ++j) dst[j] += row[j];
      ++counts[assignments_[p]];
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // unreachable after repair
      auto dst = sums.row(c);
      for (double& v : dst) v /= static_cast<double>(counts[c]);
      shift = std::max(shift, std::sqrt(squared_distance(dst, centroids_.row(c))));
      std::copy(dst.begin(), dst.end(), centroids_.row(c).begin());
    }
    return shift;
  }

  LloydResult finish(double inertia, std::size_t iterations) {
    return {std::move(centroids_), std::move(assignments_), inertia, iterations};
  }

 private:
  void repair_empty() {
    const std::size_t k = centroids_.rows();
    std::vector<std::size_t> counts(k, 0);
    for (auto a : assignments_) ++counts[a];
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = points_.rows();
      double far_d = -1.0;
      for (std::size_t p = 0; p < points_.rows(); ++p) {
        if (counts[assignments_[p]] < 2) continue;
        const double d = squared_distance(points_.row(p), centroids_.row(assignments_[p]));
        if (d > far_d) {
          far_d = d;
          far = p;
        }
      }
      if (far == points_.rows()) break;  // fewer points than clusters; guarded by callers
      --counts[assignments_[far]];
      assignments_[far] = c;
      counts[c] = 1;
      auto src = points_.row(far);
      std::copy(src.begin(), src.end(), centroids_.row(c).begin());
    }
  }

  const Matrix& points_;
  Matrix centroids_;
  std::vector<std::size_t> assignments_;
};

LloydResult run_lloyd(const Matrix& points, Matrix seeds, const KMeansOptions& options,
                      std::size_t restart) {
  Lloyd lloyd(points, std::move(seeds));
  double inertia = lloyd.assign();
  if (options.on_iteration) options.on_iteration({restart, 0, inertia});

  std::size_t it = 0;
  while (it < options.max_iter) {
    ++it;
    const double shift = lloyd.update();
    inertia = lloyd.assign();
    if (options.on_iteration) options.on_iteration({restart, it, inertia});
    if (shift <= options.tol) break;
  }
  return lloyd.finish(inertia, std::max<std::size_t>(it, 1));
}

}  // namespace

double compute_inertia(const Matrix& points, const Matrix& centroids,
                       std::span<const std::size_t> assignments) {
  double total = 0.0;
  for (std::size_t p = 0; p < points.rows(); ++p) {
    total += squared_distance(points.row(p), centroids.row(assignments[p]));
  }
  return total;
}

std::size_t count_distinct_rows(const Matrix& points) {
  std::vector<std::span<const double>> rows;
  rows.reserve(points.rows());
  for (std::size_t r = 0; r < points.rows(); ++r) rows.push_back(points.row(r));
  auto less = [](auto a, auto b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  };
  std::sort(rows.begin(), rows.end(), less);
  auto equal = [](auto a, auto b) { return std::equal(a.begin(), a.end(), b.begin(), b.end()); };
  return static_cast<std::size_t>(std::unique(rows.begin(), rows.end(), equal) - rows.begin());
}

Matrix kmeans_pp_seed(const Matrix& points, std::size_t k, Rng& rng) {
  const std::size_t n = points.rows();
  if (k == 0 || k > n || count_distinct_rows(points) < k) {
    fail(ErrorKind::TooFewDistinctPoints, "k-means++ needs k=" + std::to_string(k) +
                                              " distinct points");
  }
  check_finite(points);

  Matrix centroids(k, points.cols());
  auto place = [&](std::size_t c, std::size_t p) {
    auto src = points.row(p);
    std::copy(src.begin(), src.end(), centroids.row(c).begin());
  };

  place(0, uniform_index(rng, n));
  std::vector<double> nearest(n);
  for (std::size_t p = 0; p < n; ++p) nearest[p] = squared_distance(points.row(p), centroids.row(0));

  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double d : nearest) total += d;
    const double target = uniform01(rng) * total;
    // First point whose cumulative mass passes the target; zero-mass points
    // (already chosen or duplicates of a centroid) can never be picked.
    std::size_t pick = n;
    double cumulative = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      cumulative += nearest[p];
      if (nearest[p] > 0.0 && cumulative > target) {
        pick = p;
        break;
      }
    }
    if (pick == n) {  // rounding pushed target past the last positive mass
      for (std::size_t p = n; p-- > 0;) {
        if (nearest[p] > 0.0) {
          pick = p;
          break;
        }
      }
    }
    place(c, pick);
    for (std::size_t p = 0; p < n; ++p) {
      nearest[p] = std::min(nearest[p], squared_distance(points.row(p), centroids.row(c)));
    }
  }
  return centroids;
}

ClusterModel kmeans_fit(const Matrix& points, std::size_t k, std::uint64_t seed,
                        const KMeansOptions& options) {
  if (k == 0 || k > points.rows()) {
    fail(ErrorKind::KTooLarge, "k=" + std::to_string(k) + " is not in [1, " +
                                   std::to_string(points.rows()) + "]");
  }
  if (options.n_init == 0 || options.max_iter == 0 || !(options.tol > 0.0)) {
    fail(ErrorKind::InvalidArgument, "n_init, max_iter and tol must be positive");
  }
  check_finite(points);
  const std::size_t distinct = count_distinct_rows(points);
  if (distinct < k) {
    fail(ErrorKind::DegenerateInput, "only " + std::to_string(distinct) +
                                         " distinct points for k=" + std::to_string(k));
  }

  std::vector<LloydResult> results(options.n_init);
  parallel_for(options.n_init, [&](std::size_t r) {
    Rng rng(seed + r);
    results[r] = run_lloyd(points, kmeans_pp_seed(points, k, rng), options, r);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r) {
    if (results[r].inertia < results[best].inertia) best = r;
  }

  ClusterModel model;
  model.k = k;
  model.centroids = std::move(results[best].centroids);
  model.assignments = std::move(results[best].assignments);
  model.inertia = results[best].inertia;
  model.seed = seed;
  model.n_init = options.n_init;
  model.iterations_run = results[best].iterations;
  return model;
}

std::size_t elbow_k(std::span<const double> inertias) {
  const std::size_t n = inertias.size();
  if (n < 3) return std::min<std::size_t>(n, 2);
  std::size_t chosen = 2;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 2; k + 1 <= n; ++k) {
    // inertias[k - 1] is the inertia at K = k.
    const double second = (inertias[k - 2] - inertias[k - 1]) - (inertias[k - 1] - inertias[k]);
    if (second > best) {
      best = second;
      chosen = k;
    }
  }
  return chosen;
}

ScreeCurve scree(const Matrix& points, std::size_t k_max, std::uint64_t seed,
                 const KMeansOptions& options) {
  if (k_max < 2 || k_max > points.rows()) {
    fail(ErrorKind::KMaxTooLarge, "k_max=" + std::to_string(k_max) + " is not in [2, " +
                                      std::to_string(points.rows()) + "]");
  }
  ScreeCurve curve;
  for (std::size_t k = 1; k <= k_max; ++k) {
    curve.ks.push_back(k);
    curve.inertias.push_back(kmeans_fit(points, k, seed, options).inertia);
  }
  curve.chosen_k = elbow_k(curve.inertias);
  return curve;
}

double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size() || a.size() < 2) {
    fail(ErrorKind::LengthMismatch, "ARI needs two labelings of equal length >= 2");
  }
  auto pairs = [](double n) { return n * (n - 1.0) / 2.0; };

  std::map<std::pair<std::size_t, std::size_t>, double> table;
  std::map<std::size_t, double> rows;
  std::map<std::size_t, double> cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  double index = 0.0;
  for (const auto& [cell, n] : table) index += pairs(n);
  double sum_rows = 0.0;
  for (const auto& [label, n] : rows) sum_rows += pairs(n);
  double sum_cols = 0.0;
  for (const auto& [label, n] : cols) sum_cols += pairs(n);

  const double expected = sum_rows * sum_cols / pairs(static_cast<double>(a.size()));
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace rwcscope
