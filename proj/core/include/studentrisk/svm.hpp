#pragma once

#include <span>
#include <vector>

#include "studentrisk/matrix.hpp"

namespace studentrisk {

/// Soft-margin support vector classifier with a Gaussian radial-basis
/// kernel, K(a, b) = exp(-gamma * ||a - b||^2). Internally class 1 maps
/// to +1 and class 0 to -1.
struct SvmModel {
  Matrix support_vectors;
  /// alpha_i * y_i for each stored row; only rows with alpha_i > 0 are
  /// kept.
  std::vector<double> coefficients;
  double bias = 0.0;
  double gamma = 0.0;
  double cost = 1.0;
  int variant = 1;
  long iterations = 0;

  /// sum_i coefficients[i] * K(sv_i, row) + bias.
  double decision_value(std::span<const double> row) const;
  /// Class 1 iff the decision value is positive; 0 at the boundary.
  int predict(std::span<const double> row) const;

  bool operator==(const SvmModel&) const = default;
};

/// Kernel bandwidth from the median heuristic: 1 / (2 * median^2) of the
/// pairwise Euclidean distances, over all pairs when there are at most
/// 1000 and over 1000 uniformly sampled distinct pairs otherwise (a fixed
/// internal seed keeps the result deterministic). Falls back to 1/p when
/// the median distance is numerically zero.
double median_heuristic_gamma(const Matrix& x);

/// Solves the C-SVC dual with a pairwise coordinate (SMO-style) solver to
/// KKT tolerance 1e-3 on standardized features. Variant 1 takes gamma
/// from the median heuristic, variant 2 uses gamma = 1/p. Throws if the
/// solver has not reached tolerance after 1e6 iterations.
SvmModel fit_svm(const Matrix& x, const std::vector<int>& y, int variant,
                 double cost = 1.0);

}  // namespace studentrisk
