#pragma once

#include <span>
#include <vector>

#include "studentrisk/matrix.hpp"
#include "studentrisk/rng.hpp"

namespace studentrisk {

/// Nearest-neighbor classifier over standardized features. No structure
/// is built beyond a copy of the training data.
struct KnnModel {
  Matrix train;
  std::vector<int> labels;
  std::size_t k = 1;

  bool operator==(const KnnModel&) const = default;
};

/// Stores the training data after validating 1 <= k <= n.
KnnModel fit_knn(const Matrix& x, const std::vector<int>& y, std::size_t k);

/// Majority vote among the k nearest training rows by Euclidean distance.
/// Rows tied at the k-th distance are taken in ascending row order; a
/// tied vote goes to class 0.
int knn_predict(const KnnModel& model, std::span<const double> row);

struct KnnTuning {
  std::size_t k = 1;
  std::vector<std::size_t> candidates;
  /// Stratified CV error per candidate (mean of the per-fold rates).
  std::vector<double> errors;
};

/// Enumerates candidate k values (default: odd 1..31, filtered to the
/// smallest training-fold size) under stratified cross-validation and
/// returns the error minimizer, ties to the smaller k. The fold split
/// draws from rng.
KnnTuning optimize_k(const Matrix& x, const std::vector<int>& y, int folds,
                     Rng& rng, std::vector<std::size_t> candidates = {});

}  // namespace studentrisk
