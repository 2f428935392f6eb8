#include "studentrisk/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "studentrisk/error.hpp"
#include "studentrisk/rng.hpp"

namespace studentrisk {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double total = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    total += d * d;
  }
  return total;
}

double rbf(double gamma, double squared) { return std::exp(-gamma * squared); }

}  // namespace

double median_heuristic_gamma(const Matrix& x) {
  if (x.rows < 2 || x.cols == 0)
    throw InputError("median heuristic needs at least 2 rows and 1 column");
  const std::size_t n = x.rows;
  std::vector<double> distances;
  const std::size_t total_pairs = n * (n - 1) / 2;
  if (total_pairs <= 1000) {
    distances.reserve(total_pairs);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j)
        distances.push_back(std::sqrt(squared_distance(x.row(i), x.row(j))));
    }
  } else {
    Rng rng(0x53564D);
    distances.reserve(1000);
    for (int k = 0; k < 1000; ++k) {
      const std::size_t i = static_cast<std::size_t>(rng.below(n));
      std::size_t j = static_cast<std::size_t>(rng.below(n - 1));
      if (j >= i) ++j;
      distances.push_back(std::sqrt(squared_distance(x.row(i), x.row(j))));
    }
  }
  std::sort(distances.begin(), distances.end());
  const double median = distances[(distances.size() - 1) / 2];
  if (median <= 1e-12) return 1.0 / static_cast<double>(x.cols);
  return 1.0 / (2.0 * median * median);
}

double SvmModel::decision_value(std::span<const double> row) const {
  double value = bias;
  for (std::size_t i = 0; i < support_vectors.rows; ++i) {
    value += coefficients[i] *
             rbf(gamma, squared_distance(support_vectors.row(i), row));
  }
  return value;
}

int SvmModel::predict(std::span<const double> row) const {
  return decision_value(row) > 0.0 ? 1 : 0;
}

SvmModel fit_svm(const Matrix& x, const std::vector<int>& y, int variant,
                 double cost) {
  if (variant != 1 && variant != 2)
    throw InputError("svm variant must be 1 or 2");
  if (cost <= 0.0) throw InputError("svm cost must be positive");
  if (x.rows != y.size())
    throw InputError("label count does not match row count");
  if (x.rows < 2 || x.cols == 0)
    throw InputError("svm fitting needs at least 2 rows and 1 column");

  const std::size_t n = x.rows;
  std::vector<double> sign(n);
  bool class0 = false;
  bool class1 = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (y[i] != 0 && y[i] != 1) throw InputError("labels must be 0 or 1");
    sign[i] = y[i] == 1 ? 1.0 : -1.0;
    (y[i] == 1 ? class1 : class0) = true;
  }
  if (!class0 || !class1)
    throw ModelError("both classes must be present in the training data");

  const double gamma = variant == 1 ? median_heuristic_gamma(x)
                                    : 1.0 / static_cast<double>(x.cols);

  std::vector<double> kernel(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    kernel[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double k = rbf(gamma, squared_distance(x.row(i), x.row(j)));
      kernel[i * n + j] = k;
      kernel[j * n + i] = k;
    }
  }

  // Dual gradient of 0.5 a'Qa - sum(a) at a = 0, with Q_ij = y_i y_j K_ij.
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);

  const double kTolerance = 1e-3;
  const long kMaxIterations = 1000000;
  long iter = 0;
  double upper = 0.0;
  double lower = 0.0;
  while (true) {
    // Maximal violating pair over b_i = -y_i * grad_i: i from the rows
    // whose alpha can still grow in the +y_i direction, j from those
    // that can shrink. Ties go to the lower index.
    std::ptrdiff_t i = -1;
    std::ptrdiff_t j = -1;
    upper = -std::numeric_limits<double>::infinity();
    lower = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      const double b_t = -sign[t] * grad[t];
      const bool in_up = sign[t] > 0.0 ? alpha[t] < cost : alpha[t] > 0.0;
      const bool in_low = sign[t] > 0.0 ? alpha[t] > 0.0 : alpha[t] < cost;
      if (in_up && b_t > upper) {
        upper = b_t;
        i = static_cast<std::ptrdiff_t>(t);
      }
      if (in_low && b_t < lower) {
        lower = b_t;
        j = static_cast<std::ptrdiff_t>(t);
      }
    }
    if (upper - lower <= kTolerance) break;
    if (iter >= kMaxIterations) {
      throw ModelError(
          "svm solver failed to reach tolerance 1e-3 after 1e6 iterations; "
          "remaining KKT gap " +
          std::to_string(upper - lower) + " on " + std::to_string(n) +
          " rows with gamma " + std::to_string(gamma));
    }
    ++iter;

    const std::size_t a = static_cast<std::size_t>(i);
    const std::size_t b = static_cast<std::size_t>(j);
    const double* row_a = kernel.data() + a * n;
    const double* row_b = kernel.data() + b * n;
    // Curvature along the feasible direction equals ||phi_a - phi_b||^2
    // in feature space for both label arrangements.
    double quad = row_a[a] + row_b[b] - 2.0 * row_a[b];
    if (quad <= 1e-12) quad = 1e-12;

    const double old_a = alpha[a];
    const double old_b = alpha[b];
    if (sign[a] != sign[b]) {
      // alpha_a - alpha_b is pinned; both move together.
      const double diff = old_a - old_b;
      double next = old_a + (-grad[a] - grad[b]) / quad;
      next = std::clamp(next, std::max(0.0, diff),
                        std::min(cost, cost + diff));
      alpha[a] = next;
      alpha[b] = next - diff;
    } else {
      // alpha_a + alpha_b is pinned; they trade mass.
      const double sum = old_a + old_b;
      double next = old_a - (grad[a] - grad[b]) / quad;
      next = std::clamp(next, std::max(0.0, sum - cost),
                        std::min(cost, sum));
      alpha[a] = next;
      alpha[b] = sum - next;
    }

    const double delta_a = (alpha[a] - old_a) * sign[a];
    const double delta_b = (alpha[b] - old_b) * sign[b];
    for (std::size_t t = 0; t < n; ++t)
      grad[t] += sign[t] * (row_a[t] * delta_a + row_b[t] * delta_b);
  }

  SvmModel model;
  model.gamma = gamma;
  model.cost = cost;
  model.variant = variant;
  model.iterations = iter;

  // Bias from the free support vectors, where -y_t * grad_t equals the
  // bias exactly at the optimum; the midpoint of the final bounds
  // otherwise.
  double free_sum = 0.0;
  std::size_t free_count = 0;
  std::size_t sv_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0) ++sv_count;
    if (alpha[t] > 0.0 && alpha[t] < cost) {
      free_sum += -sign[t] * grad[t];
      ++free_count;
    }
  }
  model.bias = free_count > 0 ? free_sum / static_cast<double>(free_count)
                              : (upper + lower) / 2.0;

  model.support_vectors = Matrix(sv_count, x.cols);
  model.coefficients.resize(sv_count);
  std::size_t out = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] <= 0.0) continue;
    for (std::size_t c = 0; c < x.cols; ++c)
      model.support_vectors.at(out, c) = x.at(t, c);
    model.coefficients[out] = alpha[t] * sign[t];
    ++out;
  }
  return model;
}

}  // namespace studentrisk
