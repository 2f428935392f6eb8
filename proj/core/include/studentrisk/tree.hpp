#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "studentrisk/matrix.hpp"
#include "studentrisk/rng.hpp"

namespace studentrisk {

struct TreeGrowthConfig {
  /// Smallest node eligible for a split attempt.
  int min_split = 20;
  /// Smallest allowed child node.
  int min_bucket = 7;

  bool operator==(const TreeGrowthConfig&) const = default;
};

/// Node in preorder storage: internal nodes carry a split (rows with
/// value <= threshold go left), leaves carry var = -1. Every node keeps
/// the training class counts it saw, which is what pruning consumes.
struct TreeNode {
  std::int32_t var = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t prediction = 0;
  std::int64_t count0 = 0;
  std::int64_t count1 = 0;

  bool is_leaf() const { return var < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
  /// Preorder: nodes[0] is the root, children follow their parent.
  std::vector<TreeNode> nodes;
  TreeGrowthConfig config;
  std::int64_t n_train = 0;

  /// Routes a fully observed row to a leaf. NaN on the routing path is an
  /// error.
  int predict(std::span<const double> row) const;

  std::size_t leaf_count() const;
  /// Training rows misclassified by the stored leaves.
  std::int64_t resub_error_count() const;
  double resub_error() const {
    return static_cast<double>(resub_error_count()) /
           static_cast<double>(n_train);
  }

  std::string to_json_string() const;

  bool operator==(const DecisionTree&) const = default;
};

/// CART growth: recursive binary splits maximizing the Gini impurity
/// decrease, stopping at pure nodes, nodes smaller than min_split, or
/// when no split with positive decrease and both children >= min_bucket
/// exists. Split comparisons are exact (integer arithmetic), with ties
/// broken by lower variable index then lower threshold. Leaves predict
/// the majority class, ties to class 0.
DecisionTree grow_tree(const Matrix& x, const std::vector<int>& y,
                       const TreeGrowthConfig& config = {});

/// Growth on a row sample (duplicates allowed, e.g. a bootstrap draw).
/// When mtry < p, each split attempt considers a fresh uniform sample of
/// mtry distinct predictors, consuming rng in node preorder.
DecisionTree grow_tree(const Matrix& x, const std::vector<int>& y,
                       std::span<const std::uint32_t> rows, std::size_t mtry,
                       Rng* rng, const TreeGrowthConfig& config);

struct PruningPathEntry {
  double alpha = 0.0;
  DecisionTree subtree;
  std::size_t n_leaves = 0;
  double resub_error = 0.0;
};

/// Weakest-link cost-complexity sequence: entry 0 is the largest subtree
/// whose every split pays for itself (alpha 0), the last entry is the
/// root-only tree. Alphas are strictly increasing, leaf counts strictly
/// decreasing, and each subtree is a pruned subtree of its predecessor.
struct PruningPath {
  std::vector<PruningPathEntry> entries;

  /// Entry with the largest alpha <= the given alpha.
  const PruningPathEntry& entry_for_alpha(double alpha) const;
};

/// Computes the pruning path from the class counts recorded at growth
/// time. x and y must be the training data the tree was grown on; they
/// pin the contract (a tree only has a path relative to its training
/// set) and are checked for size.
PruningPath pruning_path(const DecisionTree& tree, const Matrix& x,
                         const std::vector<int>& y);

enum class PruneVariant { MinCv = 1, OneSe = 2 };

struct PruneResult {
  DecisionTree tree;
  /// Evaluation alpha actually selected (geometric-mean grid over the
  /// path's breakpoints; +infinity selects the root).
  double alpha = 0.0;
  std::size_t path_index = 0;
  /// Per path entry: mean and standard error of the per-fold CV error.
  std::vector<double> cv_error;
  std::vector<double> cv_se;
};

/// Selects a subtree from the path by internal stratified k-fold CV over
/// the candidate alphas. MinCv takes the alpha minimizing the CV error
/// (ties toward less pruning); OneSe takes the largest alpha whose CV
/// error stays within one standard error of that minimum.
PruneResult prune(const PruningPath& path, const Matrix& x,
                  const std::vector<int>& y, PruneVariant variant, int folds,
                  Rng& rng);

}  // namespace studentrisk
