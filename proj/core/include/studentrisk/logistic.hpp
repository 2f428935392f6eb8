#pragma once

#include <span>
#include <vector>

#include "studentrisk/matrix.hpp"

namespace studentrisk {

struct LogisticModel {
  std::vector<double> weights;
  double intercept = 0.0;
  bool converged = false;
  int iterations = 0;
  double deviance = 0.0;

  /// P(class 1 | row), clamped into (0, 1).
  double probability(std::span<const double> row) const;
  /// Class 1 iff probability > 0.5; exactly 0.5 goes to class 0.
  int predict(std::span<const double> row) const;

  bool operator==(const LogisticModel&) const = default;
};

/// Maximum-likelihood logistic regression by iteratively reweighted
/// least squares with step halving, so the deviance never increases.
/// Converged means the deviance improved by less than tol between
/// iterations; on complete separation the loop runs to max_iter and the
/// flag stays false, but predictions remain defined.
LogisticModel fit_logistic(const Matrix& x, const std::vector<int>& y,
                           int max_iter = 25, double tol = 1e-8);

}  // namespace studentrisk
