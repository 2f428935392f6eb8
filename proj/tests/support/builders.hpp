#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "studentrisk/dataset.hpp"
#include "studentrisk/matrix.hpp"
#include "studentrisk/rng.hpp"

namespace testsupport {

/// Schema with p ordinal predictors x1..xp over levels 1..n_levels and a
/// binary "success" outcome.
inline studentrisk::Schema make_schema(std::size_t p, int n_levels = 4) {
  studentrisk::Schema schema;
  std::vector<int> levels;
  for (int l = 1; l <= n_levels; ++l) levels.push_back(l);
  for (std::size_t j = 0; j < p; ++j) {
    studentrisk::VariableSpec var;
    var.name = "x" + std::to_string(j + 1);
    var.kind = n_levels == 2 ? studentrisk::VarKind::Binary
                             : studentrisk::VarKind::OrdinalDiscrete;
    var.levels = levels;
    schema.variables.push_back(var);
  }
  studentrisk::VariableSpec outcome;
  outcome.name = "success";
  outcome.kind = studentrisk::VarKind::Binary;
  outcome.levels = {0, 1};
  outcome.role = studentrisk::VarRole::Outcome;
  outcome.missing_allowed = false;
  schema.variables.push_back(outcome);
  schema.validate();
  return schema;
}

/// Dataset with uniform random levels and Bernoulli(rate) outcomes,
/// optionally blanking predictor cells with the given probability.
inline studentrisk::Dataset random_dataset(studentrisk::Rng& rng, std::size_t n,
                                           std::size_t p, int n_levels,
                                           double success_rate = 0.5,
                                           double missing_rate = 0.0) {
  studentrisk::Dataset data(make_schema(p, n_levels), n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < p; ++j) {
      if (missing_rate > 0.0 && rng.uniform_real() < missing_rate) continue;
      data.set_cell(r, j, static_cast<double>(rng.uniform_int(1, n_levels)));
    }
    data.set_cell(r, p, rng.uniform_real() < success_rate ? 1.0 : 0.0);
  }
  return data;
}

inline studentrisk::Matrix matrix_from(
    const std::vector<std::vector<double>>& rows) {
  studentrisk::Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m.at(r, c) = rows[r][c];
  }
  return m;
}

}  // namespace testsupport
