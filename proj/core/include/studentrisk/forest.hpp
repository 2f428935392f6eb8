#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "studentrisk/matrix.hpp"
#include "studentrisk/rng.hpp"
#include "studentrisk/tree.hpp"

namespace studentrisk {

struct ForestConfig {
  /// Draw each tree's rows with replacement. Disabling it (a test hook)
  /// grows every tree on all rows.
  bool bootstrap = true;
  /// Forest trees are grown out fully by default.
  TreeGrowthConfig growth{2, 1};

  bool operator==(const ForestConfig&) const = default;
};

struct RandomForest {
  std::vector<DecisionTree> trees;
  /// Per-tree row multiset, in draw order.
  std::vector<std::vector<std::uint32_t>> bootstrap_rows;
  std::size_t mtry = 0;
  std::uint64_t seed = 0;
  ForestConfig config;

  std::size_t n_trees() const { return trees.size(); }

  /// Number of trees voting class 1 for the row.
  std::size_t votes_for_success(std::span<const double> row) const;
  /// Fraction of trees voting class 1, usable as a success probability.
  double vote_fraction(std::span<const double> row) const;

  std::string to_json_string() const;

  bool operator==(const RandomForest&) const = default;
};

/// Grows n_trees unpruned trees, each on its own bootstrap sample of size
/// n, sampling mtry predictors uniformly without replacement at every
/// split attempt. Tree t draws exclusively from rng.child(t): first the n
/// bootstrap indices, then the per-node predictor samples in growth
/// preorder. No draws are taken from rng itself, so the result depends
/// only on rng's seed.
RandomForest fit_forest(const Matrix& x, const std::vector<int>& y,
                        std::size_t n_trees, std::size_t mtry, const Rng& rng,
                        const ForestConfig& config = {});

/// Majority vote over all trees; exact tie goes to class 0.
int predict_forest(const RandomForest& forest, std::span<const double> row);

enum class MtryObjective { Resubstitution, CrossValidation };

struct MtryResult {
  std::size_t mtry = 0;
  /// errors[m - 1] is the objective value for candidate m.
  std::vector<double> errors;
};

/// Enumerates mtry = 1..p and returns the candidate minimizing the chosen
/// objective (ties to the smaller mtry). The resubstitution objective
/// refits on all rows and scores them; the cross-validation objective
/// scores held-out folds of a stratified split. Candidate m's forest for
/// fold f is fit_forest(..., rng.child(m).child(f)); resubstitution
/// candidates use rng.child(m), and the fold split draws from
/// rng.child(0), so every evaluation is reproducible in isolation.
MtryResult optimize_mtry(const Matrix& x, const std::vector<int>& y,
                         std::size_t n_trees, const Rng& rng,
                         MtryObjective objective, int folds = 10,
                         const ForestConfig& config = {});

}  // namespace studentrisk
