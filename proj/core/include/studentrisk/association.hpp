#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "studentrisk/dataset.hpp"

namespace studentrisk {

/// Cross-tabulation of two discrete codings over their observed levels.
/// Built from complete pairs only, so every row and column has at least
/// one count. Declared levels that never occur are dropped and noted.
struct ContingencyTable {
  std::vector<int> row_levels;
  std::vector<int> col_levels;
  std::vector<std::int64_t> counts;
  std::int64_t total = 0;
  /// Declared levels absent from the data (recorded when built against a
  /// schema column, empty otherwise).
  std::vector<int> dropped_row_levels;

  std::int64_t at(std::size_t r, std::size_t c) const {
    return counts[r * col_levels.size() + c];
  }
};

/// Table from two code vectors; entries missing in either vector are
/// skipped. Throws InputError when no complete pair exists or either
/// coding is constant on the complete pairs.
ContingencyTable contingency(const std::vector<std::optional<int>>& a,
                             const std::vector<std::optional<int>>& b);

/// Cross-tabulates one discrete, fully observed column against the
/// outcome. Continuous columns are an error: discretize first.
ContingencyTable contingency(const Dataset& data, std::string_view variable);

struct ChiSquaredResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  /// Set when some expected count falls below 5; the test still runs.
  bool low_expected_count = false;
};

/// Pearson chi-squared test of independence. Expected counts are
/// row_total * col_total / total; the p-value is the exact upper
/// chi-squared tail. The optional Yates continuity correction
/// (|O-E| - 0.5, floored at 0) applies to 2x2 tables only and is off by
/// default.
ChiSquaredResult chi_squared_test(const ContingencyTable& table,
                                  bool yates_correction = false);

/// Spearman rank correlation with midranks for ties. x and y must have
/// equal length >= 3 and neither may be constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct SelectionConfig {
  /// Chi-squared significance level; a predictor with p < alpha is kept.
  double alpha = 0.05;
  /// Rank-correlation screen; a predictor with |rho| > tau is kept.
  /// nullopt disables the screen entirely.
  std::optional<double> tau = 0.15;
  /// Bins used to discretize continuous predictors for the chi-squared
  /// test (the rank correlation always uses raw values).
  int n_bins = 5;
};

struct AssociationRow {
  std::size_t column = 0;
  std::string name;
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  double spearman_rho = 0.0;
  bool by_chi_squared = false;
  bool by_spearman = false;
  bool selected = false;
  /// Why the variable was marked unselected when its tests failed
  /// (constant column and the like); empty on success.
  std::string diagnostic;
};

struct SelectionResult {
  SelectionConfig config;
  /// One row per predictor, sorted by |spearman rho| descending
  /// (failed variables last, schema order within ties).
  std::vector<AssociationRow> rows;
  /// Schema column indices of the selected predictors, ascending.
  std::vector<std::size_t> selected_columns;
};

/// Screens every predictor against the outcome: keep it when the
/// chi-squared test of independence is significant (p < alpha) or, if
/// the tau screen is enabled, when |Spearman rho| strictly exceeds tau.
/// A predictor whose tests fail is kept in the report, unselected, with
/// a diagnostic. Requires a complete dataset with >= 2 predictors.
SelectionResult select_variables(const Dataset& data,
                                 const SelectionConfig& config = {});

struct GroupMeansRow {
  std::string name;
  /// "{1,2,3,4}" for discrete variables, empty for continuous ones.
  std::string level_range;
  double mean_success = 0.0;
  double mean_failure = 0.0;
};

/// Per-variable mean comparison between outcome groups, in raw units.
/// Every requested variable must be fully observed and both outcome
/// groups non-empty.
std::vector<GroupMeansRow> group_means(const Dataset& data,
                                       const std::vector<std::string>& variables);

/// All-predictors overload.
std::vector<GroupMeansRow> group_means(const Dataset& data);

std::string render_selection_markdown(const SelectionResult& result);
std::string render_selection_json(const SelectionResult& result);
std::string render_group_means_markdown(const std::vector<GroupMeansRow>& rows);
std::string render_group_means_json(const std::vector<GroupMeansRow>& rows);

}  // namespace studentrisk
