#include "studentrisk/special_math.hpp"

#include <cmath>
#include <limits>

#include "studentrisk/error.hpp"

namespace studentrisk {

namespace {

constexpr int kMaxIterations = 10000;
constexpr double kEpsilon = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min() / kEpsilon;

void check_arguments(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0) || !std::isfinite(a) || !std::isfinite(x))
    throw InputError("incomplete gamma needs a > 0 and finite x >= 0");
}

/// P(a, x) by the power series x^a e^-x / Gamma(a+1) * sum x^n / prod(a+k),
/// valid for any x but efficient when x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < kMaxIterations; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEpsilon)
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw ModelError("incomplete gamma series failed to converge");
}

/// Q(a, x) by the Lentz-evaluated continued fraction, efficient for
/// x >= a + 1.
double gamma_q_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEpsilon)
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw ModelError("incomplete gamma continued fraction failed to converge");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  check_arguments(a, x);
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  check_arguments(a, x);
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_continued_fraction(a, x);
}

double chi_squared_upper_tail(double statistic, int df) {
  if (df < 1) throw InputError("chi-squared tail needs df >= 1");
  if (!(statistic >= 0.0) || !std::isfinite(statistic))
    throw InputError("chi-squared statistic must be finite and >= 0");
  return regularized_gamma_q(static_cast<double>(df) / 2.0, statistic / 2.0);
}

}  // namespace studentrisk
