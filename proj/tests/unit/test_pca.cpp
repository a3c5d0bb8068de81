#include <gtest/gtest.h>

#include <cmath>

#include "expect_error.hpp"
#include "rwcscope/pca.hpp"
#include "rwcscope/random.hpp"

using namespace rwcscope;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  std::size_t r = 0;
  for (const auto& row : rows) {
    std::size_t c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

Matrix random_matrix(Rng& rng, std::size_t n, std::size_t d) {
  Matrix m(n, d);
  for (auto& v : m.data()) v = uniform(rng, 0.0, 0.2);
  return m;
}

/// Sample covariance (n - 1 denominator) by definition.
std::vector<std::vector<double>> covariance(const Matrix& x) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  std::vector<double> mean(d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) mean[c] += x(r, c) / static_cast<double>(n);
  }
  std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t r = 0; r < n; ++r) cov[i][j] += (x(r, i) - mean[i]) * (x(r, j) - mean[j]);
      cov[i][j] /= static_cast<double>(n - 1);
    }
  }
  return cov;
}

double column_variance(const Matrix& s, std::size_t c) {
  double mean = 0.0;
  for (std::size_t r = 0; r < s.rows(); ++r) mean += s(r, c);
  mean /= static_cast<double>(s.rows());
  double acc = 0.0;
  for (std::size_t r = 0; r < s.rows(); ++r) acc += (s(r, c) - mean) * (s(r, c) - mean);
  return acc / static_cast<double>(s.rows() - 1);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

TEST(FitPca, RankOneLine) {
  const auto model = fit_pca(from_rows({{1, 2}, {2, 4}, {3, 6}}));
  const double s5 = std::sqrt(5.0);
  EXPECT_NEAR(model.components(0, 0), 1.0 / s5, 1e-12);
  EXPECT_NEAR(model.components(0, 1), 2.0 / s5, 1e-12);
  EXPECT_NEAR(model.explained_variance_ratio[0], 1.0, 1e-9);
  EXPECT_NEAR(model.explained_variance_ratio[1], 0.0, 1e-9);
  EXPECT_EQ(model.mean, (std::vector<double>{2.0, 4.0}));
}

TEST(FitPca, RankOneSecondScoreColumnIsZero) {
  const auto data = from_rows({{1, 2}, {2, 4}, {3, 6}, {-1, -2}});
  const auto scores = transform(fit_pca(data), data);
  for (std::size_t r = 0; r < scores.rows(); ++r) EXPECT_LE(std::fabs(scores(r, 1)), 1e-9);
}

TEST(FitPca, IdenticalRowsAreDegenerate) {
  EXPECT_ERROR_KIND(fit_pca(from_rows({{0.3, 0.1, 0.7}, {0.3, 0.1, 0.7}, {0.3, 0.1, 0.7}})),
                    ErrorKind::DegenerateData);
}

TEST(FitPca, SquareCornersTieResolvedLexicographically) {
  const auto model = fit_pca(from_rows({{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}));
  EXPECT_NEAR(model.explained_variance_ratio[0], 0.5, 1e-12);
  EXPECT_NEAR(model.explained_variance_ratio[1], 0.5, 1e-12);
  EXPECT_NEAR(model.explained_variance[0], 4.0 / 3.0, 1e-12);
  EXPECT_NEAR(model.explained_variance[1], 4.0 / 3.0, 1e-12);
  EXPECT_NEAR(model.components(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(model.components(0, 1), 0.0, 1e-12);
  EXPECT_NEAR(model.components(1, 0), 0.0, 1e-12);
  EXPECT_NEAR(model.components(1, 1), 1.0, 1e-12);
}

TEST(FitPca, PreconditionErrors) {
  EXPECT_ERROR_KIND(fit_pca(from_rows({{1, 2, 3}})), ErrorKind::DimensionTooSmall);
  EXPECT_ERROR_KIND(fit_pca(from_rows({{1}, {2}, {3}}), 2), ErrorKind::DimensionTooSmall);
  EXPECT_ERROR_KIND(fit_pca(from_rows({{1, 2}, {3, 4}}), 0), ErrorKind::DimensionTooSmall);
  EXPECT_ERROR_KIND(fit_pca(from_rows({{1, 2}, {3, NAN}})), ErrorKind::NonFinite);
}

TEST(FitPca, ComponentsAreEigenvectorsOfNaiveCovariance) {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + uniform_index(rng, 30);
    const std::size_t d = 2 + uniform_index(rng, 24);
    const auto data = random_matrix(rng, n, d);
    const auto model = fit_pca(data);
    const auto cov = covariance(data);
    for (std::size_t i = 0; i < model.k(); ++i) {
      const auto v = model.components.row(i);
      for (std::size_t r = 0; r < d; ++r) {
        EXPECT_NEAR(dot(cov[r], v), model.explained_variance[i] * v[r], 1e-12);
      }
    }
    double trace = 0.0;
    for (std::size_t r = 0; r < d; ++r) trace += cov[r][r];
    EXPECT_NEAR(model.explained_variance_ratio[0], model.explained_variance[0] / trace, 1e-12);
  }
}

TEST(FitPca, Invariants) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto data = random_matrix(rng, 2 + uniform_index(rng, 30), 2 + uniform_index(rng, 24));
    const auto model = fit_pca(data);
    for (std::size_t i = 0; i < model.k(); ++i) {
      EXPECT_NEAR(dot(model.components.row(i), model.components.row(i)), 1.0, 1e-9);
      for (std::size_t j = i + 1; j < model.k(); ++j) {
        EXPECT_LE(std::fabs(dot(model.components.row(i), model.components.row(j))), 1e-9);
      }
      // Sign convention: largest-magnitude entry is positive.
      std::size_t pivot = 0;
      for (std::size_t c = 1; c < model.dim(); ++c) {
        if (std::fabs(model.components(i, c)) > std::fabs(model.components(i, pivot))) pivot = c;
      }
      EXPECT_GT(model.components(i, pivot), 0.0);
    }
    EXPECT_GE(model.explained_variance[0], model.explained_variance[1]);
    EXPECT_GE(model.explained_variance[1], 0.0);
    EXPECT_LE(model.explained_variance_ratio[0] + model.explained_variance_ratio[1], 1.0 + 1e-9);

    const auto scores = transform(model, data);
    for (std::size_t c = 0; c < model.k(); ++c) {
      double mean = 0.0;
      for (std::size_t r = 0; r < scores.rows(); ++r) mean += scores(r, c);
      EXPECT_LE(std::fabs(mean / static_cast<double>(scores.rows())), 1e-9);
      const double var = column_variance(scores, c);
      // Relative to the data scale: a rank-deficient component's variance is
      // rounding noise around zero.
      EXPECT_NEAR(var, model.explained_variance[c], 1e-9 * model.explained_variance[0]);
    }
  }
}

TEST(Transform, MeanRowMapsToOrigin) {
  Rng rng(9);
  const auto data = random_matrix(rng, 10, 6);
  const auto model = fit_pca(data);
  Matrix mean_row(1, 6);
  for (std::size_t c = 0; c < 6; ++c) mean_row(0, c) = model.mean[c];
  const auto scores = transform(model, mean_row);
  EXPECT_EQ(scores(0, 0), 0.0);
  EXPECT_EQ(scores(0, 1), 0.0);
}

TEST(Transform, ReconstructsRankTwoData) {
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5 + uniform_index(rng, 20);
    const std::size_t d = 3 + uniform_index(rng, 20);
    Matrix data(n, d);
    std::vector<double> a(d), b(d), offset(d);
    for (std::size_t c = 0; c < d; ++c) {
      a[c] = uniform(rng, -1, 1);
      b[c] = uniform(rng, -1, 1);
      offset[c] = uniform(rng, 0, 1);
    }
    for (std::size_t r = 0; r < n; ++r) {
      const double s = uniform(rng, -1, 1);
      const double t = uniform(rng, -1, 1);
      for (std::size_t c = 0; c < d; ++c) data(r, c) = offset[c] + s * a[c] + t * b[c];
    }
    const auto model = fit_pca(data);
    const auto back = inverse_transform(model, transform(model, data));
    double err = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < data.data().size(); ++i) {
      err += std::pow(back.data()[i] - data.data()[i], 2);
      norm += std::pow(data.data()[i], 2);
    }
    EXPECT_LE(std::sqrt(err / norm), 1e-9);
  }
}

TEST(Transform, DimensionMismatch) {
  const auto model = fit_pca(from_rows({{1, 2}, {2, 5}, {3, 6}}));
  EXPECT_ERROR_KIND(transform(model, Matrix(2, 3)), ErrorKind::DimensionMismatch);
  EXPECT_ERROR_KIND(inverse_transform(model, Matrix(2, 3)), ErrorKind::DimensionMismatch);
}

TEST(FitPca, DeterministicAcrossRepeats) {
  Rng rng(77);
  const auto data = random_matrix(rng, 30, 24);
  const auto first = fit_pca(data);
  for (int i = 0; i < 100; ++i) {
    const auto again = fit_pca(data);
    ASSERT_EQ(again.components, first.components);
    ASSERT_EQ(again.explained_variance, first.explained_variance);
  }
}

TEST(FitPca, SingleComponent) {
  const auto model = fit_pca(from_rows({{1, 0}, {0, 1}, {2, 2}}), 1);
  EXPECT_EQ(model.k(), 1u);
  EXPECT_EQ(model.explained_variance.size(), 1u);
}
