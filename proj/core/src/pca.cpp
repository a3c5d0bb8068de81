#include "rwcscope/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "rwcscope/error.hpp"

namespace rwcscope {

namespace {

// Relative gap under which two eigenvalues are treated as tied.
constexpr double kTieTolerance = 1e-12;

void normalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index pivot = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[pivot])) pivot = i;
  }
  if (v[pivot] < 0) v = -v;
}

bool lexicographically_greater(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return false;
}

}  // namespace

PcaModel fit_pca(const Matrix& data, std::size_t k) {
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  if (n < 2 || d < 1 || k < 1 || k > std::min(n, d)) {
    fail(ErrorKind::DimensionTooSmall, "PCA with k=" + std::to_string(k) + " needs at least " +
                                           "2 rows and k <= min(rows, cols); got " +
                                           std::to_string(n) + "x" + std::to_string(d));
  }
  for (double v : data.data()) {
    if (!std::isfinite(v)) fail(ErrorKind::NonFinite, "PCA input contains a non-finite value");
  }

  Eigen::MatrixXd x(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) x(r, c) = data(r, c);
  }
  bool all_equal = true;
  for (std::size_t r = 1; r < n && all_equal; ++r) {
    all_equal = std::equal(data.row(r).begin(), data.row(r).end(), data.row(0).begin());
  }
  if (all_equal) {
    fail(ErrorKind::DegenerateData, "all rows are identical; the centered matrix is zero");
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;

  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    fail(ErrorKind::DegenerateData, "covariance eigendecomposition did not converge");
  }

  const Eigen::VectorXd& eigenvalues = solver.eigenvalues();  // ascending
  Eigen::MatrixXd vectors = solver.eigenvectors();
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) normalize_sign(vectors.col(j));

  std::vector<Eigen::Index> order(d);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return eigenvalues[a] > eigenvalues[b];
  });
  std::vector<double> variances(d);
  for (std::size_t i = 0; i < d; ++i) variances[i] = std::max(0.0, eigenvalues[order[i]]);
  const double top = std::max(std::abs(eigenvalues[order.front()]), 1e-300);
  for (std::size_t begin = 0; begin < order.size();) {
    std::size_t end = begin + 1;
    while (end < order.size() &&
           eigenvalues[order[begin]] - eigenvalues[order[end]] <= kTieTolerance * top) {
      ++end;
    }
    std::sort(order.begin() + begin, order.begin() + end, [&](Eigen::Index a, Eigen::Index b) {
      return lexicographically_greater(vectors.col(a), vectors.col(b));
    });
    begin = end;
  }

  const double total = std::max(0.0, cov.trace());
  PcaModel model;
  model.mean.assign(mean.data(), mean.data() + d);
  model.components = Matrix(k, d);
  for (std::size_t i = 0; i < k; ++i) {
    const auto col = vectors.col(order[i]);
    for (std::size_t c = 0; c < d; ++c) model.components(i, c) = col[c];
    // Tied components swap vectors only; variances stay in descending order.
    const double variance = variances[i];
    model.explained_variance.push_back(variance);
    model.explained_variance_ratio.push_back(total > 0.0 ? variance / total : 0.0);
  }
  return model;
}

Matrix transform(const PcaModel& model, const Matrix& data) {
  if (data.cols() != model.dim()) {
    fail(ErrorKind::DimensionMismatch, "PCA model expects " + std::to_string(model.dim()) +
                                           " columns, got " + std::to_string(data.cols()));
  }
  Matrix scores(data.rows(), model.k());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t i = 0; i < model.k(); ++i) {
      double acc = 0.0;
      for (std::size_t c = 0; c < model.dim(); ++c) {
        acc += (data(r, c) - model.mean[c]) * model.components(i, c);
      }
      scores(r, i) = acc;
    }
  }
  return scores;
}

Matrix inverse_transform(const PcaModel& model, const Matrix& scores) {
  if (scores.cols() != model.k()) {
    fail(ErrorKind::DimensionMismatch, "PCA model has " + std::to_string(model.k()) +
                                           " components, scores have " +
                                           std::to_string(scores.cols()));
  }
  Matrix out(scores.rows(), model.dim());
  for (std::size_t r = 0; r < scores.rows(); ++r) {
    for (std::size_t c = 0; c < model.dim(); ++c) {
      double acc = model.mean[c];
      for (std::size_t i = 0; i < model.k(); ++i) acc += scores(r, i) * model.components(i, c);
      out(r, c) = acc;
    }
  }
  return out;
}

}  // namespace rwcscope
