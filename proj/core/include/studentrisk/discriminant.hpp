#pragma once

#include <array>
#include <span>
#include <vector>

#include "studentrisk/matrix.hpp"

namespace studentrisk {

/// Linear discriminant classifier for two classes: shared pooled
/// covariance, class-specific means, priors from class frequencies.
struct LdaModel {
  Matrix means;            // 2 x p, row c = mean of class c
  Matrix covariance;       // pooled, after any ridge
  Matrix inverse;
  std::array<double, 2> log_prior{0.0, 0.0};
  bool ridged = false;

  /// Per-class discriminant scores; higher wins, tie goes to class 0.
  std::array<double, 2> discriminants(std::span<const double> row) const;
  int predict(std::span<const double> row) const;

  bool operator==(const LdaModel&) const = default;
};

/// Quadratic discriminant classifier: per-class covariances.
struct QdaModel {
  Matrix means;
  std::array<Matrix, 2> covariance;
  std::array<Matrix, 2> inverse;
  std::array<double, 2> log_det{0.0, 0.0};
  std::array<double, 2> log_prior{0.0, 0.0};
  std::array<bool, 2> ridged{false, false};

  std::array<double, 2> discriminants(std::span<const double> row) const;
  int predict(std::span<const double> row) const;

  bool operator==(const QdaModel&) const = default;
};

/// Fits LDA on standardized features: pooled within-class covariance with
/// divisor n-2, priors = class frequencies. If the covariance's smallest
/// eigenvalue is below 1e-10, a ridge of 1e-6 * trace/p is added to the
/// diagonal and the ridged flag is set. Both classes must be present.
LdaModel fit_lda(const Matrix& x, const std::vector<int>& y);

/// Fits QDA: per-class covariance with divisor n_c - 1, the same ridge
/// rule applied per class.
QdaModel fit_qda(const Matrix& x, const std::vector<int>& y);

}  // namespace studentrisk
