#include "studentrisk/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "studentrisk/error.hpp"
#include "studentrisk/folds.hpp"
#include "tree_grow.hpp"

namespace studentrisk {

namespace detail {

LevelTable LevelTable::build(const Matrix& x) {
  LevelTable table;
  table.n = x.rows;
  table.p = x.cols;
  table.distinct.resize(x.cols);
  table.code.resize(x.rows * x.cols);
  std::vector<double> column(x.rows);
  for (std::size_t v = 0; v < x.cols; ++v) {
    for (std::size_t r = 0; r < x.rows; ++r) {
      const double value = x.at(r, v);
      if (std::isnan(value))
        throw InputError("tree growth requires fully observed features");
      column[r] = value;
    }
    std::vector<double>& values = table.distinct[v];
    values = column;
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t r = 0; r < x.rows; ++r) {
      table.code[r * x.cols + v] = static_cast<std::uint32_t>(
          std::lower_bound(values.begin(), values.end(), column[r]) -
          values.begin());
    }
  }
  return table;
}

namespace {

using Int128 = __int128;

struct BestSplit {
  std::int32_t var = -1;
  std::uint32_t left_level = 0;
  std::uint32_t right_level = 0;
  std::int64_t n_left = 0;
  Int128 numerator = 0;
  std::int64_t denominator = 1;
};

class Grower {
 public:
  Grower(const LevelTable& table, const std::vector<int>& y, std::size_t mtry,
         Rng* rng, const TreeGrowthConfig& config)
      : table_(table), y_(y), mtry_(mtry), rng_(rng), config_(config) {
    std::size_t max_levels = 0;
    for (const std::vector<double>& values : table_.distinct)
      max_levels = std::max(max_levels, values.size());
    cnt0_.assign(max_levels, 0);
    cnt1_.assign(max_levels, 0);
    var_pool_.resize(table_.p);
  }

  DecisionTree grow(std::span<const std::uint32_t> sample) {
    rows_.assign(sample.begin(), sample.end());
    DecisionTree tree;
    tree.config = config_;
    tree.n_train = static_cast<std::int64_t>(rows_.size());
    nodes_.clear();
    std::int64_t c0 = 0;
    std::int64_t c1 = 0;
    for (const std::uint32_t r : rows_) (y_[r] == 1 ? c1 : c0) += 1;
    build_node(0, rows_.size(), c0, c1);
    tree.nodes = std::move(nodes_);
    return tree;
  }

 private:
  std::int32_t build_node(std::size_t begin, std::size_t end, std::int64_t c0,
                          std::int64_t c1) {
    const std::int32_t index = static_cast<std::int32_t>(nodes_.size());
    TreeNode node;
    node.count0 = c0;
    node.count1 = c1;
    node.prediction = c1 > c0 ? 1 : 0;
    nodes_.push_back(node);

    const std::int64_t m = c0 + c1;
    if (c0 == 0 || c1 == 0 || m < config_.min_split) return index;

    const BestSplit best = find_split(begin, end, c0, c1);
    if (best.var < 0) return index;

    const std::size_t var = static_cast<std::size_t>(best.var);
    const std::vector<double>& values = table_.distinct[var];
    double threshold =
        (values[best.left_level] + values[best.right_level]) / 2.0;
    // Rounding can push the midpoint onto the right value; keep the
    // threshold strictly below it so routing matches the integer
    // partition below.
    if (threshold >= values[best.right_level])
      threshold = values[best.left_level];

    const std::uint32_t* base_code = table_.code.data() + var;
    const std::size_t stride = table_.p;
    const std::uint32_t cut = best.left_level;
    auto mid = std::partition(rows_.begin() + begin, rows_.begin() + end,
                              [&](std::uint32_t r) {
                                return base_code[r * stride] <= cut;
                              });
    const std::size_t split = static_cast<std::size_t>(mid - rows_.begin());

    std::int64_t l0 = 0;
    std::int64_t l1 = 0;
    for (std::size_t i = begin; i < split; ++i)
      (y_[rows_[i]] == 1 ? l1 : l0) += 1;

    nodes_[index].var = best.var;
    nodes_[index].threshold = threshold;
    const std::int32_t left = build_node(begin, split, l0, l1);
    nodes_[index].left = left;
    const std::int32_t right = build_node(split, end, c0 - l0, c1 - l1);
    nodes_[index].right = right;
    return index;
  }

  BestSplit find_split(std::size_t begin, std::size_t end, std::int64_t c0,
                       std::int64_t c1) {
    const std::int64_t m = c0 + c1;
    // m^2 * gini(parent); all comparisons below stay in exact integers so
    // equal-quality splits tie exactly and the (variable, threshold)
    // order decides.
    const Int128 parent_term =
        Int128(m) * m - Int128(c0) * c0 - Int128(c1) * c1;

    BestSplit best;
    const std::size_t n_candidates = pick_candidates();
    for (std::size_t ci = 0; ci < n_candidates; ++ci) {
      const std::size_t var = candidates_[ci];
      const std::uint32_t* base_code = table_.code.data() + var;
      const std::size_t stride = table_.p;

      touched_.clear();
      for (std::size_t i = begin; i < end; ++i) {
        const std::uint32_t r = rows_[i];
        const std::uint32_t code = base_code[r * stride];
        if (cnt0_[code] + cnt1_[code] == 0) touched_.push_back(code);
        (y_[r] == 1 ? cnt1_ : cnt0_)[code] += 1;
      }
      if (touched_.size() >= 2) {
        std::sort(touched_.begin(), touched_.end());
        std::int64_t l0 = 0;
        std::int64_t l1 = 0;
        for (std::size_t j = 0; j + 1 < touched_.size(); ++j) {
          l0 += cnt0_[touched_[j]];
          l1 += cnt1_[touched_[j]];
          const std::int64_t n_left = l0 + l1;
          const std::int64_t n_right = m - n_left;
          if (n_left < config_.min_bucket || n_right < config_.min_bucket)
            continue;
          const std::int64_t r0 = c0 - l0;
          const std::int64_t r1 = c1 - l1;
          const Int128 left_term =
              Int128(n_left) * n_left - Int128(l0) * l0 - Int128(l1) * l1;
          const Int128 right_term =
              Int128(n_right) * n_right - Int128(r0) * r0 - Int128(r1) * r1;
          // numerator = m^2 * n_left * n_right * gini decrease.
          const Int128 numerator =
              Int128(n_left) * n_right * parent_term -
              Int128(m) * (Int128(n_right) * left_term +
                           Int128(n_left) * right_term);
          if (numerator <= 0) continue;
          const std::int64_t denominator = n_left * n_right;
          const bool better =
              best.var < 0 || numerator * best.denominator >
                                  best.numerator * denominator;
          if (better) {
            best.var = static_cast<std::int32_t>(var);
            best.left_level = touched_[j];
            best.right_level = touched_[j + 1];
            best.n_left = n_left;
            best.numerator = numerator;
            best.denominator = denominator;
          }
        }
      }
      for (const std::uint32_t code : touched_) {
        cnt0_[code] = 0;
        cnt1_[code] = 0;
      }
    }
    return best;
  }

  /// Fills candidates_ with the variables to scan, ascending. Draws from
  /// rng only when mtry < p.
  std::size_t pick_candidates() {
    const std::size_t p = table_.p;
    if (mtry_ >= p) {
      candidates_.resize(p);
      std::iota(candidates_.begin(), candidates_.end(), std::size_t{0});
      return p;
    }
    std::iota(var_pool_.begin(), var_pool_.end(), std::size_t{0});
    for (std::size_t i = 0; i < mtry_; ++i) {
      const std::size_t j =
          i + static_cast<std::size_t>(rng_->below(p - i));
      std::swap(var_pool_[i], var_pool_[j]);
    }
    candidates_.assign(var_pool_.begin(), var_pool_.begin() + mtry_);
    std::sort(candidates_.begin(), candidates_.end());
    return mtry_;
  }

  const LevelTable& table_;
  const std::vector<int>& y_;
  std::size_t mtry_;
  Rng* rng_;
  TreeGrowthConfig config_;
  std::vector<std::uint32_t> rows_;
  std::vector<TreeNode> nodes_;
  std::vector<std::int64_t> cnt0_;
  std::vector<std::int64_t> cnt1_;
  std::vector<std::uint32_t> touched_;
  std::vector<std::size_t> var_pool_;
  std::vector<std::size_t> candidates_;
};

}  // namespace

DecisionTree grow_planned(const LevelTable& table, const Matrix& x,
                          const std::vector<int>& y,
                          std::span<const std::uint32_t> rows,
                          std::size_t mtry, Rng* rng,
                          const TreeGrowthConfig& config) {
  if (x.rows == 0 || x.cols == 0)
    throw InputError("tree growth needs a non-empty feature matrix");
  if (y.size() != x.rows)
    throw InputError("label count does not match row count");
  if (rows.empty()) throw InputError("tree growth needs at least one row");
  if (mtry < 1 || mtry > x.cols)
    throw InputError("mtry must lie in [1, p]");
  if (mtry < x.cols && rng == nullptr)
    throw InputError("predictor sampling needs a random source");
  if (config.min_split < 1 || config.min_bucket < 1)
    throw InputError("growth minima must be >= 1");
  for (const int label : y) {
    if (label != 0 && label != 1)
      throw InputError("tree labels must be 0 or 1");
  }
  for (const std::uint32_t r : rows) {
    if (r >= x.rows) throw InputError("row index out of range");
  }
  Grower grower(table, y, mtry, rng, config);
  return grower.grow(rows);
}

namespace {

nlohmann::json node_doc(const DecisionTree& tree, std::int32_t index) {
  const TreeNode& node = tree.nodes[static_cast<std::size_t>(index)];
  nlohmann::json out;
  out["counts"] = {node.count0, node.count1};
  out["prediction"] = node.prediction;
  if (!node.is_leaf()) {
    out["var"] = node.var;
    out["threshold"] = node.threshold;
    out["left"] = node_doc(tree, node.left);
    out["right"] = node_doc(tree, node.right);
  }
  return out;
}

}  // namespace

nlohmann::json tree_to_json(const DecisionTree& tree) {
  nlohmann::json doc;
  doc["n_train"] = tree.n_train;
  doc["min_split"] = tree.config.min_split;
  doc["min_bucket"] = tree.config.min_bucket;
  doc["root"] = node_doc(tree, 0);
  return doc;
}

}  // namespace detail

int DecisionTree::predict(std::span<const double> row) const {
  std::size_t i = 0;
  while (true) {
    const TreeNode& node = nodes[i];
    if (node.is_leaf()) return node.prediction;
    const double value = row[static_cast<std::size_t>(node.var)];
    if (std::isnan(value))
      throw ModelError("missing value for variable " +
                       std::to_string(node.var) + " on the routing path");
    i = static_cast<std::size_t>(value <= node.threshold ? node.left
                                                         : node.right);
  }
}

std::size_t DecisionTree::leaf_count() const {
  std::size_t count = 0;
  for (const TreeNode& node : nodes) {
    if (node.is_leaf()) ++count;
  }
  return count;
}

std::int64_t DecisionTree::resub_error_count() const {
  std::int64_t errors = 0;
  for (const TreeNode& node : nodes) {
    if (node.is_leaf()) errors += std::min(node.count0, node.count1);
  }
  return errors;
}

std::string DecisionTree::to_json_string() const {
  return detail::tree_to_json(*this).dump(2) + "\n";
}

DecisionTree grow_tree(const Matrix& x, const std::vector<int>& y,
                       const TreeGrowthConfig& config) {
  std::vector<std::uint32_t> rows(x.rows);
  std::iota(rows.begin(), rows.end(), 0u);
  const detail::LevelTable table = detail::LevelTable::build(x);
  return detail::grow_planned(table, x, y, rows, x.cols, nullptr, config);
}

DecisionTree grow_tree(const Matrix& x, const std::vector<int>& y,
                       std::span<const std::uint32_t> rows, std::size_t mtry,
                       Rng* rng, const TreeGrowthConfig& config) {
  const detail::LevelTable table = detail::LevelTable::build(x);
  return detail::grow_planned(table, x, y, rows, mtry, rng, config);
}

namespace {

/// Bookkeeping for weakest-link pruning over the preorder node array.
/// Children always follow their parent, so one descending pass computes
/// subtree aggregates and one ascending pass computes visibility.
struct PruneState {
  const DecisionTree& tree;
  std::vector<char> collapsed;
  std::vector<std::int64_t> subtree_error;
  std::vector<std::int64_t> subtree_leaves;
  std::vector<char> alive;

  explicit PruneState(const DecisionTree& t)
      : tree(t),
        collapsed(t.nodes.size(), 0),
        subtree_error(t.nodes.size(), 0),
        subtree_leaves(t.nodes.size(), 0),
        alive(t.nodes.size(), 0) {}

  static std::int64_t leaf_error(const TreeNode& node) {
    return std::min(node.count0, node.count1);
  }

  bool acts_as_leaf(std::size_t i) const {
    return tree.nodes[i].is_leaf() || collapsed[i];
  }

  void refresh() {
    for (std::size_t idx = tree.nodes.size(); idx-- > 0;) {
      const TreeNode& node = tree.nodes[idx];
      if (acts_as_leaf(idx)) {
        subtree_error[idx] = leaf_error(node);
        subtree_leaves[idx] = 1;
      } else {
        subtree_error[idx] = subtree_error[static_cast<std::size_t>(node.left)] +
                             subtree_error[static_cast<std::size_t>(node.right)];
        subtree_leaves[idx] =
            subtree_leaves[static_cast<std::size_t>(node.left)] +
            subtree_leaves[static_cast<std::size_t>(node.right)];
      }
    }
    std::fill(alive.begin(), alive.end(), 0);
    alive[0] = 1;
    for (std::size_t idx = 0; idx < tree.nodes.size(); ++idx) {
      if (!alive[idx] || acts_as_leaf(idx)) continue;
      const TreeNode& node = tree.nodes[idx];
      alive[static_cast<std::size_t>(node.left)] = 1;
      alive[static_cast<std::size_t>(node.right)] = 1;
    }
  }

  /// Error-count increase of collapsing node i over keeping its subtree.
  std::int64_t collapse_cost(std::size_t i) const {
    return leaf_error(tree.nodes[i]) - subtree_error[i];
  }

  std::int32_t materialize_node(std::size_t src, std::vector<TreeNode>& out) const {
    const std::int32_t index = static_cast<std::int32_t>(out.size());
    TreeNode node = tree.nodes[src];
    if (acts_as_leaf(src)) {
      node.var = -1;
      node.threshold = 0.0;
      node.left = -1;
      node.right = -1;
      out.push_back(node);
    } else {
      out.push_back(node);
      const std::int32_t left =
          materialize_node(static_cast<std::size_t>(node.left), out);
      out[static_cast<std::size_t>(index)].left = left;
      const std::int32_t right =
          materialize_node(static_cast<std::size_t>(node.right), out);
      out[static_cast<std::size_t>(index)].right = right;
    }
    return index;
  }

  PruningPathEntry make_entry(double alpha) const {
    PruningPathEntry entry;
    entry.alpha = alpha;
    entry.subtree.config = tree.config;
    entry.subtree.n_train = tree.n_train;
    materialize_node(0, entry.subtree.nodes);
    entry.n_leaves = static_cast<std::size_t>(subtree_leaves[0]);
    entry.resub_error = static_cast<double>(subtree_error[0]) /
                        static_cast<double>(tree.n_train);
    return entry;
  }
};

}  // namespace

const PruningPathEntry& PruningPath::entry_for_alpha(double alpha) const {
  if (entries.empty()) throw ModelError("empty pruning path");
  std::size_t chosen = 0;
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].alpha <= alpha) chosen = i;
  }
  return entries[chosen];
}

PruningPath pruning_path(const DecisionTree& tree, const Matrix& x,
                         const std::vector<int>& y) {
  if (tree.nodes.empty()) throw InputError("cannot prune an empty tree");
  if (x.rows != y.size())
    throw InputError("label count does not match row count");

  PruneState state(tree);
  state.refresh();

  PruningPath path;
  // Splits that do not reduce the leaf-level error count are free to
  // remove; collapsing them first yields the alpha = 0 subtree.
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (state.alive[i] && !state.acts_as_leaf(i) && state.collapse_cost(i) == 0)
      state.collapsed[i] = 1;
  }
  state.refresh();
  path.entries.push_back(state.make_entry(0.0));

  while (state.subtree_leaves[0] > 1) {
    // Weakest link: minimize cost / (leaves - 1), compared exactly as
    // rationals. Collapse every minimizer at once.
    std::int64_t best_num = 0;
    std::int64_t best_den = 0;
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      if (!state.alive[i] || state.acts_as_leaf(i)) continue;
      const std::int64_t num = state.collapse_cost(i);
      const std::int64_t den = state.subtree_leaves[i] - 1;
      if (best_den == 0 || num * best_den < best_num * den) {
        best_num = num;
        best_den = den;
      }
    }
    const double alpha = static_cast<double>(best_num) /
                         (static_cast<double>(tree.n_train) *
                          static_cast<double>(best_den));
    if (!(alpha > path.entries.back().alpha))
      throw ModelError("pruning path alphas failed to increase");
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      if (!state.alive[i] || state.acts_as_leaf(i)) continue;
      const std::int64_t num = state.collapse_cost(i);
      const std::int64_t den = state.subtree_leaves[i] - 1;
      if (num * best_den == best_num * den) state.collapsed[i] = 1;
    }
    state.refresh();
    path.entries.push_back(state.make_entry(alpha));
  }
  return path;
}

PruneResult prune(const PruningPath& path, const Matrix& x,
                  const std::vector<int>& y, PruneVariant variant, int folds,
                  Rng& rng) {
  if (path.entries.empty()) throw InputError("empty pruning path");
  if (x.rows != y.size())
    throw InputError("label count does not match row count");
  const std::size_t n_entries = path.entries.size();
  const TreeGrowthConfig config = path.entries.front().subtree.config;

  // Candidate alphas: one per path entry, placed at the geometric mean of
  // adjacent breakpoints so each candidate falls strictly inside its
  // entry's optimality interval. The last interval is unbounded.
  std::vector<double> candidates(n_entries);
  for (std::size_t k = 0; k < n_entries; ++k) {
    if (k == 0) {
      candidates[k] = 0.0;
    } else if (k + 1 == n_entries) {
      candidates[k] = std::numeric_limits<double>::infinity();
    } else {
      candidates[k] =
          std::sqrt(path.entries[k].alpha * path.entries[k + 1].alpha);
    }
  }

  const FoldAssignment assignment = stratified_folds(y, folds, rng);
  const detail::LevelTable table = detail::LevelTable::build(x);

  std::vector<std::vector<double>> fold_errors(
      n_entries, std::vector<double>(static_cast<std::size_t>(folds), 0.0));
  for (int f = 0; f < folds; ++f) {
    std::vector<std::uint32_t> train_rows;
    std::vector<std::uint32_t> val_rows;
    for (std::size_t r = 0; r < y.size(); ++r) {
      if (assignment.fold_of_row[r] == f)
        val_rows.push_back(static_cast<std::uint32_t>(r));
      else
        train_rows.push_back(static_cast<std::uint32_t>(r));
    }
    const DecisionTree fold_tree =
        detail::grow_planned(table, x, y, train_rows, x.cols, nullptr, config);
    const PruningPath fold_path = pruning_path(fold_tree, x, y);
    for (std::size_t k = 0; k < n_entries; ++k) {
      const DecisionTree& subtree =
          fold_path.entry_for_alpha(candidates[k]).subtree;
      std::size_t errors = 0;
      for (const std::uint32_t r : val_rows) {
        if (subtree.predict(x.row(r)) != y[r]) ++errors;
      }
      fold_errors[k][static_cast<std::size_t>(f)] =
          static_cast<double>(errors) / static_cast<double>(val_rows.size());
    }
  }

  PruneResult result;
  result.cv_error.resize(n_entries);
  result.cv_se.resize(n_entries);
  for (std::size_t k = 0; k < n_entries; ++k) {
    double mean = 0.0;
    for (const double e : fold_errors[k]) mean += e;
    mean /= static_cast<double>(folds);
    double ss = 0.0;
    for (const double e : fold_errors[k]) ss += (e - mean) * (e - mean);
    const double sd = std::sqrt(ss / static_cast<double>(folds - 1));
    result.cv_error[k] = mean;
    result.cv_se[k] = sd / std::sqrt(static_cast<double>(folds));
  }

  std::size_t chosen = 0;
  for (std::size_t k = 1; k < n_entries; ++k) {
    if (result.cv_error[k] < result.cv_error[chosen]) chosen = k;
  }
  if (variant == PruneVariant::OneSe) {
    const double threshold = result.cv_error[chosen] + result.cv_se[chosen];
    for (std::size_t k = n_entries; k-- > 0;) {
      if (result.cv_error[k] <= threshold) {
        chosen = k;
        break;
      }
    }
  }
  result.tree = path.entries[chosen].subtree;
  result.alpha = candidates[chosen];
  result.path_index = chosen;
  return result;
}

}  // namespace studentrisk
