#pragma once

#include <cstdint>
#include <vector>

#include "studentrisk/dataset.hpp"
#include "studentrisk/rng.hpp"

namespace studentrisk {

/// Assignment of every row to one of k cross-validation folds.
struct FoldAssignment {
  std::vector<int> fold_of_row;
  int k = 0;
  std::uint64_t seed = 0;

  RowIndexSet validation_rows(int fold) const;
  RowIndexSet training_rows(int fold) const;
};

/// Stratified fold assignment: within each class, rows are shuffled and
/// dealt to folds in blocks of floor(m/k) or ceil(m/k). The classes'
/// leftover rows are spread over a rolling window of folds, so total fold
/// sizes also differ by at most 1. Requires 2 <= k <= n.
FoldAssignment stratified_folds(const std::vector<int>& labels, int k,
                                Rng& rng);

}  // namespace studentrisk
