#pragma once

namespace studentrisk {

/// Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0.
/// Series expansion for x < a + 1, continued fraction otherwise; relative
/// accuracy is driven to machine epsilon, comfortably inside 1e-10.
double regularized_gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed
/// directly (not via subtraction) so tiny tail values keep full relative
/// precision.
double regularized_gamma_q(double a, double x);

/// Upper tail of the chi-squared distribution with df degrees of freedom:
/// P(X >= statistic) = Q(df/2, statistic/2). df must be >= 1 and the
/// statistic non-negative.
double chi_squared_upper_tail(double statistic, int df);

}  // namespace studentrisk
