#include "studentrisk/knn.hpp"

#include <algorithm>
#include <cmath>

#include "studentrisk/error.hpp"
#include "studentrisk/folds.hpp"

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

/// (squared distance, training row) pairs sorted ascending, so equal
/// distances resolve to the lower row index.
std::vector<std::pair<double, std::size_t>> sorted_distances(
    const Matrix& train, std::span<const double> row) {
  std::vector<std::pair<double, std::size_t>> order(train.rows);
  for (std::size_t i = 0; i < train.rows; ++i)
    order[i] = {squared_distance(train.row(i), row), i};
  std::sort(order.begin(), order.end());
  return order;
}

int vote(const std::vector<std::pair<double, std::size_t>>& order,
         const std::vector<int>& labels, std::size_t k) {
  std::size_t ones = 0;
  for (std::size_t i = 0; i < k; ++i) ones += labels[order[i].second] == 1;
  return 2 * ones > k ? 1 : 0;
}

}  // namespace

KnnModel fit_knn(const Matrix& x, const std::vector<int>& y, std::size_t k) {
  if (x.rows == 0 || x.cols == 0)
    throw InputError("knn fitting needs a non-empty matrix");
  if (x.rows != y.size())
    throw InputError("label count does not match row count");
  if (k < 1 || k > x.rows) throw InputError("k must lie in [1, n]");
  for (const int label : y) {
    if (label != 0 && label != 1) throw InputError("labels must be 0 or 1");
  }
  return KnnModel{x, y, k};
}

int knn_predict(const KnnModel& model, std::span<const double> row) {
  const std::vector<std::pair<double, std::size_t>> order =
      sorted_distances(model.train, row);
  return vote(order, model.labels, model.k);
}

KnnTuning optimize_k(const Matrix& x, const std::vector<int>& y, int folds,
                     Rng& rng, std::vector<std::size_t> candidates) {
  if (x.rows < static_cast<std::size_t>(folds))
    throw InputError("k enumeration needs n >= folds");
  if (candidates.empty()) {
    for (std::size_t k = 1; k <= 31; k += 2) candidates.push_back(k);
  }

  const FoldAssignment assignment = stratified_folds(y, folds, rng);
  std::size_t min_train = x.rows;
  for (int f = 0; f < folds; ++f)
    min_train = std::min(min_train, assignment.training_rows(f).size());
  std::erase_if(candidates,
                [&](std::size_t k) { return k < 1 || k > min_train; });
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  if (candidates.empty())
    throw InputError("no candidate k fits the training folds");

  KnnTuning tuning;
  tuning.candidates = candidates;
  tuning.errors.assign(candidates.size(), 0.0);

  for (int f = 0; f < folds; ++f) {
    const RowIndexSet train_rows = assignment.training_rows(f);
    const RowIndexSet val_rows = assignment.validation_rows(f);
    Matrix train(train_rows.size(), x.cols);
    std::vector<int> train_labels(train_rows.size());
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
      for (std::size_t c = 0; c < x.cols; ++c)
        train.at(i, c) = x.at(train_rows[i], c);
      train_labels[i] = y[train_rows[i]];
    }
    std::vector<std::size_t> wrong(candidates.size(), 0);
    for (const std::size_t r : val_rows) {
      const std::vector<std::pair<double, std::size_t>> order =
          sorted_distances(train, x.row(r));
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (vote(order, train_labels, candidates[c]) != y[r]) ++wrong[c];
      }
    }
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      tuning.errors[c] += static_cast<double>(wrong[c]) /
                          static_cast<double>(val_rows.size()) /
                          static_cast<double>(folds);
    }
  }

  std::size_t best = 0;
  for (std::size_t c = 1; c < candidates.size(); ++c) {
    if (tuning.errors[c] < tuning.errors[best]) best = c;
  }
  tuning.k = candidates[best];
  return tuning;
}

}  // namespace studentrisk
