#include "studentrisk/folds.hpp"

#include <algorithm>

#include "studentrisk/error.hpp"

namespace studentrisk {

RowIndexSet FoldAssignment::validation_rows(int fold) const {
  RowIndexSet rows;
  for (std::size_t r = 0; r < fold_of_row.size(); ++r) {
    if (fold_of_row[r] == fold) rows.push_back(r);
  }
  return rows;
}

RowIndexSet FoldAssignment::training_rows(int fold) const {
  RowIndexSet rows;
  for (std::size_t r = 0; r < fold_of_row.size(); ++r) {
    if (fold_of_row[r] != fold) rows.push_back(r);
  }
  return rows;
}

FoldAssignment stratified_folds(const std::vector<int>& labels, int k,
                                Rng& rng) {
  const std::size_t n = labels.size();
  if (k < 2) throw InputError("cross-validation needs at least 2 folds");
  if (static_cast<std::size_t>(k) > n)
    throw InputError("more folds (" + std::to_string(k) + ") than rows (" +
                     std::to_string(n) + ")");

  std::vector<int> classes = labels;
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  FoldAssignment assignment;
  assignment.fold_of_row.assign(n, -1);
  assignment.k = k;
  assignment.seed = rng.seed();

  // Classes take turns handing their leftover rows (m mod k of them) to a
  // window of folds that rolls forward between classes; concatenated, the
  // windows walk the folds cyclically, which keeps total fold sizes within
  // one of each other.
  int window_start = 0;
  for (const int cls : classes) {
    std::vector<std::size_t> members;
    for (std::size_t r = 0; r < n; ++r) {
      if (labels[r] == cls) members.push_back(r);
    }
    rng.shuffle(members);

    const std::size_t base = members.size() / static_cast<std::size_t>(k);
    const int extras = static_cast<int>(members.size() % static_cast<std::size_t>(k));
    std::size_t next = 0;
    for (int fold = 0; fold < k; ++fold) {
      const int offset = (fold - window_start + k) % k;
      std::size_t count = base + (offset < extras ? 1 : 0);
      while (count-- > 0) assignment.fold_of_row[members[next++]] = fold;
    }
    window_start = (window_start + extras) % k;
  }
  return assignment;
}

}  // namespace studentrisk
