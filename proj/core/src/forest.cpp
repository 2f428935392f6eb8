#include "studentrisk/forest.hpp"

#include <numeric>

#include <nlohmann/json.hpp>

#include "studentrisk/error.hpp"
#include "studentrisk/folds.hpp"
#include "tree_grow.hpp"

namespace studentrisk {

std::size_t RandomForest::votes_for_success(
    std::span<const double> row) const {
  std::size_t votes = 0;
  for (const DecisionTree& tree : trees) {
    if (tree.predict(row) == 1) ++votes;
  }
  return votes;
}

double RandomForest::vote_fraction(std::span<const double> row) const {
  if (trees.empty()) throw ModelError("forest has no trees");
  return static_cast<double>(votes_for_success(row)) /
         static_cast<double>(trees.size());
}

std::string RandomForest::to_json_string() const {
  nlohmann::json doc;
  doc["seed"] = seed;
  doc["mtry"] = mtry;
  doc["n_trees"] = trees.size();
  doc["bootstrap"] = config.bootstrap;
  doc["min_split"] = config.growth.min_split;
  doc["min_bucket"] = config.growth.min_bucket;
  nlohmann::json tree_docs = nlohmann::json::array();
  for (const DecisionTree& tree : trees)
    tree_docs.push_back(detail::tree_to_json(tree));
  doc["trees"] = std::move(tree_docs);
  return doc.dump(2) + "\n";
}

RandomForest fit_forest(const Matrix& x, const std::vector<int>& y,
                        std::size_t n_trees, std::size_t mtry, const Rng& rng,
                        const ForestConfig& config) {
  if (x.rows < 2) throw InputError("forest fitting needs at least two rows");
  if (n_trees < 1) throw InputError("n_trees must be >= 1");
  if (mtry < 1 || mtry > x.cols)
    throw InputError("mtry must lie in [1, p], got " + std::to_string(mtry) +
                     " with p = " + std::to_string(x.cols));

  const detail::LevelTable table = detail::LevelTable::build(x);
  const std::size_t n = x.rows;

  RandomForest forest;
  forest.mtry = mtry;
  forest.seed = rng.seed();
  forest.config = config;
  forest.trees.reserve(n_trees);
  forest.bootstrap_rows.reserve(n_trees);

  std::vector<std::uint32_t> rows(n);
  for (std::size_t t = 0; t < n_trees; ++t) {
    Rng tree_rng = rng.child(t);
    if (config.bootstrap) {
      for (std::size_t i = 0; i < n; ++i)
        rows[i] = static_cast<std::uint32_t>(tree_rng.below(n));
    } else {
      std::iota(rows.begin(), rows.end(), 0u);
    }
    forest.trees.push_back(detail::grow_planned(table, x, y, rows, mtry,
                                                &tree_rng, config.growth));
    forest.bootstrap_rows.push_back(rows);
  }
  return forest;
}

int predict_forest(const RandomForest& forest, std::span<const double> row) {
  if (forest.trees.empty()) throw ModelError("forest has no trees");
  const std::size_t votes = forest.votes_for_success(row);
  return 2 * votes > forest.trees.size() ? 1 : 0;
}

namespace {

double forest_resub_error(const RandomForest& forest, const Matrix& x,
                          const std::vector<int>& y) {
  std::size_t errors = 0;
  for (std::size_t r = 0; r < x.rows; ++r) {
    if (predict_forest(forest, x.row(r)) != y[r]) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(x.rows);
}

}  // namespace

MtryResult optimize_mtry(const Matrix& x, const std::vector<int>& y,
                         std::size_t n_trees, const Rng& rng,
                         MtryObjective objective, int folds,
                         const ForestConfig& config) {
  if (x.cols < 1) throw InputError("mtry enumeration needs p >= 1");
  if (y.size() != x.rows)
    throw InputError("label count does not match row count");
  const std::size_t p = x.cols;

  MtryResult result;
  result.errors.assign(p, 0.0);

  if (objective == MtryObjective::Resubstitution) {
    for (std::size_t m = 1; m <= p; ++m) {
      const RandomForest forest =
          fit_forest(x, y, n_trees, m, rng.child(m), config);
      result.errors[m - 1] = forest_resub_error(forest, x, y);
    }
  } else {
    Rng fold_rng = rng.child(0);
    const FoldAssignment assignment = stratified_folds(y, folds, fold_rng);
    for (int f = 0; f < folds; ++f) {
      const RowIndexSet train_rows = assignment.training_rows(f);
      const RowIndexSet val_rows = assignment.validation_rows(f);
      Matrix xf(train_rows.size(), p);
      std::vector<int> yf(train_rows.size());
      for (std::size_t i = 0; i < train_rows.size(); ++i) {
        const std::size_t r = train_rows[i];
        for (std::size_t v = 0; v < p; ++v) xf.at(i, v) = x.at(r, v);
        yf[i] = y[r];
      }
      for (std::size_t m = 1; m <= p; ++m) {
        const RandomForest forest =
            fit_forest(xf, yf, n_trees, m, rng.child(m).child(f), config);
        std::size_t errors = 0;
        for (const std::size_t r : val_rows) {
          if (predict_forest(forest, x.row(r)) != y[r]) ++errors;
        }
        result.errors[m - 1] += static_cast<double>(errors) /
                                static_cast<double>(val_rows.size()) /
                                static_cast<double>(folds);
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < p; ++i) {
    if (result.errors[i] < result.errors[best]) best = i;
  }
  result.mtry = best + 1;
  return result;
}

}  // namespace studentrisk
