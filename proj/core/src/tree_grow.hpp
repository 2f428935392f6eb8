#pragma once

// Internal helpers shared by tree.cpp and forest.cpp; not installed.

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "studentrisk/matrix.hpp"
#include "studentrisk/rng.hpp"
#include "studentrisk/tree.hpp"

namespace studentrisk::detail {

/// Per-dataset precomputation reused across every tree grown on the same
/// matrix: each column's sorted distinct values plus, per cell, the index
/// of its value in that column's table. Split search then counts over
/// these compact codes instead of comparing doubles.
struct LevelTable {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<std::vector<double>> distinct;
  std::vector<std::uint32_t> code;

  static LevelTable build(const Matrix& x);
};

/// Grows one tree over the given row multiset. When mtry < p, every split
/// attempt draws mtry distinct predictors from rng (node preorder,
/// parents before children, left subtree first); when mtry == p no draws
/// are consumed.
DecisionTree grow_planned(const LevelTable& table, const Matrix& x,
                          const std::vector<int>& y,
                          std::span<const std::uint32_t> rows,
                          std::size_t mtry, Rng* rng,
                          const TreeGrowthConfig& config);

/// Nested-node JSON document for one tree.
nlohmann::json tree_to_json(const DecisionTree& tree);

}  // namespace studentrisk::detail
