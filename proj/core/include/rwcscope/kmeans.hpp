#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rwcscope/matrix.hpp"
#include "rwcscope/random.hpp"

namespace rwcscope {

struct ClusterModel {
  std::size_t k = 0;
  Matrix centroids;                      // k x D
  std::vector<std::size_t> assignments;  // one cluster id per point
  double inertia = 0.0;
  std::uint64_t seed = 0;
  std::size_t n_init = 0;
  std::size_t iterations_run = 0;
};

/// Reported after every assignment step of every restart. Restarts may run on
/// different threads, so the callback must be thread-safe.
struct IterationEvent {
  std::size_t restart;
  std::size_t iteration;  // 0 = assignment to the seeded centroids
  double inertia;
};

struct KMeansOptions {
  std::size_t n_init = 10;
  std::size_t max_iter = 300;
  double tol = 1e-6;  // stop when no centroid moves farther than this (L2)
  std::function<void(const IterationEvent&)> on_iteration;
};

/// k-means++ seeding: the first centroid is drawn uniformly, each further one
/// with probability proportional to its squared distance to the nearest chosen
/// centroid. Throws TooFewDistinctPoints when k exceeds the distinct rows.
Matrix kmeans_pp_seed(const Matrix& points, std::size_t k, Rng& rng);

/// Best-of-n_init Lloyd's k-means. Restart r is seeded with `seed + r`; the
/// lowest-inertia restart wins, ties going to the lower restart index.
/// Empty clusters are refilled with the point farthest from its centroid.
ClusterModel kmeans_fit(const Matrix& points, std::size_t k, std::uint64_t seed,
                        const KMeansOptions& options = {});

/// Inertia for K = ks[i], plus the elbow pick.
struct ScreeCurve {
  std::vector<std::size_t> ks;
  std::vector<double> inertias;
  std::size_t chosen_k = 0;
};

/// Fits K = 1..k_max and picks the elbow. Requires 2 <= k_max <= rows.
ScreeCurve scree(const Matrix& points, std::size_t k_max, std::uint64_t seed,
                 const KMeansOptions& options = {});

/// Elbow of an inertia curve given for K = 1..n: the K in [2, n-1] maximizing
/// the second difference (I[K-1] - I[K]) - (I[K] - I[K+1]), ties toward the
/// smaller K. Curves shorter than three points return min(n, 2).
std::size_t elbow_k(std::span<const double> inertias);

/// Sum of squared distances from each point to its assigned centroid.
double compute_inertia(const Matrix& points, const Matrix& centroids,
                       std::span<const std::size_t> assignments);

std::size_t count_distinct_rows(const Matrix& points);

/// Adjusted Rand index of two labelings. 1.0 when both are identical up to
/// renaming (including the trivial all-in-one-cluster case).
double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b);

}  // namespace rwcscope
