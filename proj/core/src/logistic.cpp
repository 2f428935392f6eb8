#include "studentrisk/logistic.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "studentrisk/error.hpp"

namespace studentrisk {

namespace {

double log1pexp(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

/// Binomial deviance 2 * sum(log(1+exp(eta)) - y*eta), computed without
/// overflow for large |eta|.
double deviance_of(const Eigen::VectorXd& eta, const std::vector<int>& y) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    total += log1pexp(eta[i]);
    if (y[static_cast<std::size_t>(i)] == 1) total -= eta[i];
  }
  return 2.0 * total;
}

/// Deviance change when moving from eta_old to eta_new. Differencing the
/// per-row contributions before summing keeps the result accurate near the
/// optimum, where the two totals agree in almost every digit.
double deviance_delta(const Eigen::VectorXd& eta_new,
                      const Eigen::VectorXd& eta_old,
                      const std::vector<int>& y) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < eta_new.size(); ++i) {
    double term = log1pexp(eta_new[i]) - log1pexp(eta_old[i]);
    if (y[static_cast<std::size_t>(i)] == 1) term -= eta_new[i] - eta_old[i];
    total += term;
  }
  return 2.0 * total;
}

}  // namespace

double LogisticModel::probability(std::span<const double> row) const {
  double eta = intercept;
  for (std::size_t j = 0; j < weights.size(); ++j) eta += weights[j] * row[j];
  const double p = sigmoid(eta);
  const double lo = std::numeric_limits<double>::min();
  const double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  return std::min(std::max(p, lo), hi);
}

int LogisticModel::predict(std::span<const double> row) const {
  return probability(row) > 0.5 ? 1 : 0;
}

LogisticModel fit_logistic(const Matrix& x, const std::vector<int>& y,
                           int max_iter, double tol) {
  if (x.rows != y.size())
    throw InputError("label count does not match row count");
  if (x.rows == 0) throw InputError("logistic fitting needs rows");
  bool class0 = false;
  bool class1 = false;
  for (const int label : y) {
    if (label != 0 && label != 1) throw InputError("labels must be 0 or 1");
    (label == 1 ? class1 : class0) = true;
  }
  if (!class0 || !class1)
    throw ModelError("both classes must be present in the training data");

  const Eigen::Index n = static_cast<Eigen::Index>(x.rows);
  const Eigen::Index q = static_cast<Eigen::Index>(x.cols) + 1;

  Eigen::MatrixXd design(n, q);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    for (std::size_t j = 0; j < x.cols; ++j)
      design(i, static_cast<Eigen::Index>(j) + 1) =
          x.at(static_cast<std::size_t>(i), j);
  }

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
  double dev = deviance_of(eta, y);

  LogisticModel model;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    Eigen::VectorXd residual(n);
    Eigen::VectorXd weight(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mu = sigmoid(eta[i]);
      residual[i] = static_cast<double>(y[static_cast<std::size_t>(i)]) - mu;
      weight[i] = mu * (1.0 - mu);
    }
    Eigen::MatrixXd hessian =
        design.transpose() * weight.asDiagonal() * design;
    hessian.diagonal().array() += 1e-10;
    const Eigen::VectorXd gradient = design.transpose() * residual;
    Eigen::VectorXd step = hessian.ldlt().solve(gradient);

    // Halve the Newton step until the deviance does not increase.
    double applied_delta = 0.0;
    bool improved = false;
    for (int halving = 0; halving < 30; ++halving) {
      const Eigen::VectorXd candidate = beta + step;
      const Eigen::VectorXd candidate_eta = design * candidate;
      const double delta = deviance_delta(candidate_eta, eta, y);
      if (delta <= 0.0) {
        beta = candidate;
        eta = candidate_eta;
        applied_delta = delta;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) {
      model.converged = true;
      break;
    }
    dev += applied_delta;
    if (-applied_delta < tol) {
      model.converged = true;
      ++iter;
      break;
    }
  }

  model.iterations = iter;
  model.deviance = dev;
  model.intercept = beta[0];
  model.weights.resize(x.cols);
  for (std::size_t j = 0; j < x.cols; ++j)
    model.weights[j] = beta[static_cast<Eigen::Index>(j) + 1];
  return model;
}

}  // namespace studentrisk
