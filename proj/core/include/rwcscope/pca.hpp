#pragma once

#include <cstddef>
#include <vector>

#include "rwcscope/matrix.hpp"

namespace rwcscope {

/// Principal component model of a rows-as-samples matrix.
///
/// Components are unit rows ordered by descending variance. Each component's
/// largest-magnitude entry is positive (first such index on ties); components
/// with equal variance are ordered lexicographically descending. Variances use
/// the (n - 1) denominator.
struct PcaModel {
  std::vector<double> mean;
  Matrix components;  // k x D
  std::vector<double> explained_variance;
  std::vector<double> explained_variance_ratio;

  std::size_t k() const noexcept { return components.rows(); }
  std::size_t dim() const noexcept { return components.cols(); }
};

/// Fits the top-k principal directions of `data` (L x D).
/// Errors: DimensionTooSmall when L < 2 or k outside [1, min(L, D)];
/// NonFinite for non-finite entries; DegenerateData when every row is equal.
PcaModel fit_pca(const Matrix& data, std::size_t k = 2);

/// (data - mean) * components^T. Throws DimensionMismatch on width mismatch.
Matrix transform(const PcaModel& model, const Matrix& data);

/// scores * components + mean.
Matrix inverse_transform(const PcaModel& model, const Matrix& scores);

}  // namespace rwcscope
