#include "studentrisk/discriminant.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "studentrisk/error.hpp"

namespace studentrisk {

namespace {

using EigenMatrix = Eigen::MatrixXd;
using EigenVector = Eigen::VectorXd;

struct ClassSplit {
  std::array<std::vector<std::size_t>, 2> rows;
  std::array<double, 2> log_prior;
};

ClassSplit split_classes(const Matrix& x, const std::vector<int>& y) {
  if (x.rows != y.size())
    throw InputError("label count does not match row count");
  if (x.rows == 0 || x.cols == 0)
    throw InputError("discriminant fitting needs a non-empty matrix");
  ClassSplit split;
  for (std::size_t r = 0; r < y.size(); ++r) {
    if (y[r] != 0 && y[r] != 1)
      throw InputError("labels must be 0 or 1");
    split.rows[static_cast<std::size_t>(y[r])].push_back(r);
  }
  for (int c = 0; c < 2; ++c) {
    if (split.rows[static_cast<std::size_t>(c)].empty())
      throw ModelError("class " + std::to_string(c) +
                       " is absent from the training data");
    split.log_prior[static_cast<std::size_t>(c)] = std::log(
        static_cast<double>(split.rows[static_cast<std::size_t>(c)].size()) /
        static_cast<double>(y.size()));
  }
  return split;
}

EigenVector class_mean(const Matrix& x, const std::vector<std::size_t>& rows) {
  EigenVector mean = EigenVector::Zero(static_cast<Eigen::Index>(x.cols));
  for (const std::size_t r : rows) {
    for (std::size_t j = 0; j < x.cols; ++j)
      mean[static_cast<Eigen::Index>(j)] += x.at(r, j);
  }
  return mean / static_cast<double>(rows.size());
}

EigenMatrix class_scatter(const Matrix& x,
                          const std::vector<std::size_t>& rows,
                          const EigenVector& mean) {
  const Eigen::Index p = static_cast<Eigen::Index>(x.cols);
  EigenMatrix scatter = EigenMatrix::Zero(p, p);
  EigenVector centered(p);
  for (const std::size_t r : rows) {
    for (std::size_t j = 0; j < x.cols; ++j) {
      centered[static_cast<Eigen::Index>(j)] =
          x.at(r, j) - mean[static_cast<Eigen::Index>(j)];
    }
    scatter.selfadjointView<Eigen::Lower>().rankUpdate(centered);
  }
  return scatter.selfadjointView<Eigen::Lower>();
}

/// Adds 1e-6 * trace/p to the diagonal when the smallest eigenvalue
/// falls below 1e-10. Returns whether the ridge was applied.
bool ridge_if_needed(EigenMatrix& cov) {
  const Eigen::SelfAdjointEigenSolver<EigenMatrix> solver(
      cov, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() >= 1e-10) return false;
  const double ridge =
      1e-6 * cov.trace() / static_cast<double>(cov.rows());
  cov.diagonal().array() += ridge;
  return true;
}

struct Inverted {
  EigenMatrix inverse;
  double log_det;
};

Inverted invert_spd(const EigenMatrix& cov, const char* what) {
  const Eigen::LLT<EigenMatrix> llt(cov);
  if (llt.info() != Eigen::Success)
    throw ModelError(std::string(what) +
                     " covariance is not positive definite after ridging");
  Inverted out;
  out.inverse = llt.solve(EigenMatrix::Identity(cov.rows(), cov.cols()));
  out.log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return out;
}

Matrix to_matrix(const EigenMatrix& m) {
  Matrix out(static_cast<std::size_t>(m.rows()),
             static_cast<std::size_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      out.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) =
          m(r, c);
  }
  return out;
}

/// row' * m * col for studentrisk matrices and plain buffers.
double quadratic_form(const Matrix& m, std::span<const double> a,
                      std::span<const double> b) {
  double total = 0.0;
  for (std::size_t i = 0; i < m.rows; ++i) {
    double inner = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) inner += m.at(i, j) * b[j];
    total += a[i] * inner;
  }
  return total;
}

}  // namespace

std::array<double, 2> LdaModel::discriminants(
    std::span<const double> row) const {
  std::array<double, 2> scores;
  for (std::size_t c = 0; c < 2; ++c) {
    const std::span<const double> mu = means.row(c);
    // x' S^-1 mu - mu' S^-1 mu / 2 + log prior
    scores[c] = quadratic_form(inverse, row, mu) -
                0.5 * quadratic_form(inverse, mu, mu) + log_prior[c];
  }
  return scores;
}

int LdaModel::predict(std::span<const double> row) const {
  const std::array<double, 2> scores = discriminants(row);
  return scores[1] > scores[0] ? 1 : 0;
}

std::array<double, 2> QdaModel::discriminants(
    std::span<const double> row) const {
  std::array<double, 2> scores;
  std::vector<double> centered(means.cols);
  for (std::size_t c = 0; c < 2; ++c) {
    const std::span<const double> mu = means.row(c);
    for (std::size_t j = 0; j < centered.size(); ++j)
      centered[j] = row[j] - mu[j];
    scores[c] = -0.5 * log_det[c] -
                0.5 * quadratic_form(inverse[c], centered, centered) +
                log_prior[c];
  }
  return scores;
}

int QdaModel::predict(std::span<const double> row) const {
  const std::array<double, 2> scores = discriminants(row);
  return scores[1] > scores[0] ? 1 : 0;
}

LdaModel fit_lda(const Matrix& x, const std::vector<int>& y) {
  const ClassSplit split = split_classes(x, y);
  if (x.rows < 3)
    throw ModelError("pooled covariance needs at least 3 rows");

  const Eigen::Index p = static_cast<Eigen::Index>(x.cols);
  LdaModel model;
  model.means = Matrix(2, x.cols);
  model.log_prior = split.log_prior;

  EigenMatrix pooled = EigenMatrix::Zero(p, p);
  for (std::size_t c = 0; c < 2; ++c) {
    const EigenVector mean = class_mean(x, split.rows[c]);
    for (std::size_t j = 0; j < x.cols; ++j)
      model.means.at(c, j) = mean[static_cast<Eigen::Index>(j)];
    pooled += class_scatter(x, split.rows[c], mean);
  }
  pooled /= static_cast<double>(x.rows - 2);

  model.ridged = ridge_if_needed(pooled);
  const Inverted inv = invert_spd(pooled, "pooled");
  model.covariance = to_matrix(pooled);
  model.inverse = to_matrix(inv.inverse);
  return model;
}

QdaModel fit_qda(const Matrix& x, const std::vector<int>& y) {
  const ClassSplit split = split_classes(x, y);

  QdaModel model;
  model.means = Matrix(2, x.cols);
  model.log_prior = split.log_prior;

  for (std::size_t c = 0; c < 2; ++c) {
    if (split.rows[c].size() < 2)
      throw ModelError("class " + std::to_string(c) +
                       " needs at least 2 rows for a covariance");
    const EigenVector mean = class_mean(x, split.rows[c]);
    for (std::size_t j = 0; j < x.cols; ++j)
      model.means.at(c, j) = mean[static_cast<Eigen::Index>(j)];
    EigenMatrix cov = class_scatter(x, split.rows[c], mean) /
                      static_cast<double>(split.rows[c].size() - 1);
    model.ridged[c] = ridge_if_needed(cov);
    const Inverted inv = invert_spd(cov, c == 0 ? "class 0" : "class 1");
    model.covariance[c] = to_matrix(cov);
    model.inverse[c] = to_matrix(inv.inverse);
    model.log_det[c] = inv.log_det;
  }
  return model;
}

}  // namespace studentrisk
