#include "studentrisk/association.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "studentrisk/error.hpp"
#include "studentrisk/special_math.hpp"

namespace studentrisk {

namespace {

std::vector<int> sorted_distinct(const std::vector<int>& values) {
  std::vector<int> out = values;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t level_index(const std::vector<int>& levels, int code) {
  return static_cast<std::size_t>(
      std::lower_bound(levels.begin(), levels.end(), code) - levels.begin());
}

/// Midranks: tied values share the average of the ranks they span.
std::vector<double> midranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank =
        (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::string format(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, value);
  return buf;
}

nlohmann::json json_number(double value) {
  if (std::isnan(value)) return nullptr;
  return value;
}

std::vector<std::optional<int>> column_codes(const Dataset& data,
                                             std::size_t col, int n_bins) {
  const VariableSpec& var = data.schema().variables[col];
  const std::vector<Cell> cells = data.column(col);
  if (var.is_discrete()) {
    std::vector<std::optional<int>> codes(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].has_value()) codes[i] = static_cast<int>(*cells[i]);
    }
    return codes;
  }
  return discretize(cells, n_bins);
}

}  // namespace

ContingencyTable contingency(const std::vector<std::optional<int>>& a,
                             const std::vector<std::optional<int>>& b) {
  if (a.size() != b.size())
    throw InputError("contingency inputs differ in length");
  std::vector<int> codes_a;
  std::vector<int> codes_b;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].has_value() && b[i].has_value()) {
      codes_a.push_back(*a[i]);
      codes_b.push_back(*b[i]);
    }
  }
  if (codes_a.empty()) throw InputError("no complete pairs to cross-tabulate");

  ContingencyTable table;
  table.row_levels = sorted_distinct(codes_a);
  table.col_levels = sorted_distinct(codes_b);
  if (table.row_levels.size() < 2 || table.col_levels.size() < 2)
    throw InputError("cross-tabulated variable is constant on complete pairs");
  table.counts.assign(table.row_levels.size() * table.col_levels.size(), 0);
  for (std::size_t i = 0; i < codes_a.size(); ++i) {
    const std::size_t r = level_index(table.row_levels, codes_a[i]);
    const std::size_t c = level_index(table.col_levels, codes_b[i]);
    ++table.counts[r * table.col_levels.size() + c];
  }
  table.total = static_cast<std::int64_t>(codes_a.size());
  return table;
}

ContingencyTable contingency(const Dataset& data, std::string_view variable) {
  const std::optional<std::size_t> col = data.schema().index_of(variable);
  if (!col.has_value())
    throw InputError("unknown variable '" + std::string(variable) + "'");
  const VariableSpec& var = data.schema().variables[*col];
  if (!var.is_discrete())
    throw InputError("variable '" + var.name +
                     "' is continuous; discretize before cross-tabulating");
  if (data.column_has_missing(*col))
    throw InputError("variable '" + var.name +
                     "' has missing cells; impute before cross-tabulating");

  std::vector<std::optional<int>> codes(data.n_rows());
  std::vector<std::optional<int>> outcome(data.n_rows());
  const std::vector<int> labels = data.outcome_labels();
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    codes[r] = static_cast<int>(*data.cell(r, *col));
    outcome[r] = labels[r];
  }
  ContingencyTable table = contingency(codes, outcome);
  for (const int level : var.levels) {
    if (!std::binary_search(table.row_levels.begin(), table.row_levels.end(),
                            level))
      table.dropped_row_levels.push_back(level);
  }
  return table;
}

ChiSquaredResult chi_squared_test(const ContingencyTable& table,
                                  bool yates_correction) {
  const std::size_t n_rows = table.row_levels.size();
  const std::size_t n_cols = table.col_levels.size();
  if (n_rows < 2 || n_cols < 2)
    throw InputError("chi-squared test needs at least a 2x2 table");
  if (table.total <= 0) throw InputError("contingency table is empty");
  if (yates_correction && (n_rows != 2 || n_cols != 2))
    throw InputError("continuity correction applies to 2x2 tables only");

  std::vector<std::int64_t> row_sums(n_rows, 0);
  std::vector<std::int64_t> col_sums(n_cols, 0);
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (std::size_t c = 0; c < n_cols; ++c) {
      const std::int64_t count = table.at(r, c);
      if (count < 0) throw InputError("contingency table has a negative count");
      row_sums[r] += count;
      col_sums[c] += count;
    }
  }
  for (std::size_t r = 0; r < n_rows; ++r) {
    if (row_sums[r] == 0) throw InputError("contingency table has an empty row");
  }
  for (std::size_t c = 0; c < n_cols; ++c) {
    if (col_sums[c] == 0)
      throw InputError("contingency table has an empty column");
  }

  const double total = static_cast<double>(table.total);
  ChiSquaredResult result;
  double statistic = 0.0;
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (std::size_t c = 0; c < n_cols; ++c) {
      const double expected =
          static_cast<double>(row_sums[r]) * static_cast<double>(col_sums[c]) /
          total;
      if (expected < 5.0) result.low_expected_count = true;
      double diff = std::fabs(static_cast<double>(table.at(r, c)) - expected);
      if (yates_correction) diff = std::max(0.0, diff - 0.5);
      statistic += diff * diff / expected;
    }
  }
  result.statistic = statistic;
  result.df = static_cast<int>((n_rows - 1) * (n_cols - 1));
  result.p_value = chi_squared_upper_tail(statistic, result.df);
  return result;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw InputError("Spearman inputs differ in length");
  if (x.size() < 3)
    throw InputError("Spearman correlation needs at least 3 pairs");
  const std::vector<double> rx = midranks(x);
  const std::vector<double> ry = midranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw InputError("Spearman correlation is undefined for a constant input");
  return sxy / std::sqrt(sxx * syy);
}

SelectionResult select_variables(const Dataset& data,
                                 const SelectionConfig& config) {
  if (!(config.alpha >= 0.0 && config.alpha <= 1.0))
    throw InputError("selection alpha must lie in [0,1]");
  if (config.tau.has_value() && !(*config.tau >= 0.0))
    throw InputError("selection tau must be >= 0");
  const std::vector<std::size_t> predictors = data.schema().predictor_indices();
  if (predictors.size() < 2)
    throw InputError("selection needs at least 2 predictors");

  const std::vector<int> labels = data.outcome_labels();
  std::vector<std::optional<int>> outcome_codes(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) outcome_codes[i] = labels[i];

  constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
  SelectionResult result;
  result.config = config;
  for (const std::size_t col : predictors) {
    const VariableSpec& var = data.schema().variables[col];
    if (data.column_has_missing(col))
      throw InputError("predictor '" + var.name +
                       "' has missing cells; impute before selection");
    AssociationRow row;
    row.column = col;
    row.name = var.name;
    row.statistic = kNan;
    row.df = 0;
    row.p_value = kNan;
    row.spearman_rho = kNan;
    try {
      const ChiSquaredResult chi2 =
          chi_squared_test(contingency(column_codes(data, col, config.n_bins),
                                       outcome_codes));
      row.statistic = chi2.statistic;
      row.df = chi2.df;
      row.p_value = chi2.p_value;

      std::vector<double> x(data.n_rows());
      std::vector<double> y(data.n_rows());
      for (std::size_t r = 0; r < data.n_rows(); ++r) {
        x[r] = *data.cell(r, col);
        y[r] = static_cast<double>(labels[r]);
      }
      row.spearman_rho = spearman(x, y);

      row.by_chi_squared = row.p_value < config.alpha;
      row.by_spearman = config.tau.has_value() &&
                        std::fabs(row.spearman_rho) > *config.tau;
      row.selected = row.by_chi_squared || row.by_spearman;
    } catch (const Error& err) {
      row.diagnostic = err.what();
      row.by_chi_squared = false;
      row.by_spearman = false;
      row.selected = false;
    }
    if (row.selected) result.selected_columns.push_back(col);
    result.rows.push_back(std::move(row));
  }

  std::stable_sort(result.rows.begin(), result.rows.end(),
                   [](const AssociationRow& a, const AssociationRow& b) {
                     const double ra =
                         std::isnan(a.spearman_rho) ? -1.0 : std::fabs(a.spearman_rho);
                     const double rb =
                         std::isnan(b.spearman_rho) ? -1.0 : std::fabs(b.spearman_rho);
                     return ra > rb;
                   });
  return result;
}

std::vector<GroupMeansRow> group_means(
    const Dataset& data, const std::vector<std::string>& variables) {
  const std::vector<int> labels = data.outcome_labels();
  std::vector<GroupMeansRow> rows;
  for (const std::string& name : variables) {
    const std::optional<std::size_t> col = data.schema().index_of(name);
    if (!col.has_value()) throw InputError("unknown variable '" + name + "'");
    const VariableSpec& var = data.schema().variables[*col];
    if (data.column_has_missing(*col))
      throw InputError("variable '" + name +
                       "' has missing cells; impute before comparing groups");
    GroupMeansRow row;
    row.name = name;
    if (var.is_discrete()) row.level_range = var.levels_label();
    double sums[2] = {0.0, 0.0};
    std::size_t counts[2] = {0, 0};
    for (std::size_t r = 0; r < data.n_rows(); ++r) {
      sums[labels[r]] += *data.cell(r, *col);
      ++counts[labels[r]];
    }
    if (counts[0] == 0)
      throw InputError("failure group is empty; group means are undefined");
    if (counts[1] == 0)
      throw InputError("success group is empty; group means are undefined");
    row.mean_success = sums[1] / static_cast<double>(counts[1]);
    row.mean_failure = sums[0] / static_cast<double>(counts[0]);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<GroupMeansRow> group_means(const Dataset& data) {
  std::vector<std::string> names;
  for (const std::size_t col : data.schema().predictor_indices())
    names.push_back(data.schema().variables[col].name);
  return group_means(data, names);
}

std::string render_selection_markdown(const SelectionResult& result) {
  std::string out =
      "| Variable | Chi-squared | df | p-value | Spearman rho | Selected |\n"
      "|---|---|---|---|---|---|\n";
  for (const AssociationRow& row : result.rows) {
    out += "| " + row.name + " | ";
    if (row.diagnostic.empty()) {
      out += format("%.3f", row.statistic) + " | " + std::to_string(row.df) +
             " | " + format("%.4g", row.p_value) + " | " +
             format("%.3f", row.spearman_rho) + " | " +
             (row.selected ? "yes" : "no");
    } else {
      out += "- | - | - | - | no (" + row.diagnostic + ")";
    }
    out += " |\n";
  }
  return out;
}

std::string render_selection_json(const SelectionResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const AssociationRow& row : result.rows) {
    nlohmann::json item;
    item["variable"] = row.name;
    item["statistic"] = json_number(row.statistic);
    item["df"] = row.df;
    item["p_value"] = json_number(row.p_value);
    item["spearman_rho"] = json_number(row.spearman_rho);
    item["selected"] = row.selected;
    item["by_chi_squared"] = row.by_chi_squared;
    item["by_spearman"] = row.by_spearman;
    if (!row.diagnostic.empty()) item["diagnostic"] = row.diagnostic;
    rows.push_back(std::move(item));
  }
  nlohmann::json doc;
  doc["alpha"] = result.config.alpha;
  if (result.config.tau.has_value())
    doc["tau"] = *result.config.tau;
  else
    doc["tau"] = nullptr;
  doc["selected_count"] = result.selected_columns.size();
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::string render_group_means_markdown(const std::vector<GroupMeansRow>& rows) {
  std::string out =
      "| Variable | Levels | Mean (success) | Mean (failure) |\n"
      "|---|---|---|---|\n";
  for (const GroupMeansRow& row : rows) {
    out += "| " + row.name + " | " +
           (row.level_range.empty() ? "-" : row.level_range) + " | " +
           format("%.2f", row.mean_success) + " | " +
           format("%.2f", row.mean_failure) + " |\n";
  }
  return out;
}

std::string render_group_means_json(const std::vector<GroupMeansRow>& rows) {
  nlohmann::json items = nlohmann::json::array();
  for (const GroupMeansRow& row : rows) {
    nlohmann::json item;
    item["variable"] = row.name;
    item["levels"] = row.level_range;
    item["mean_success"] = row.mean_success;
    item["mean_failure"] = row.mean_failure;
    items.push_back(std::move(item));
  }
  nlohmann::json doc;
  doc["rows"] = std::move(items);
  return doc.dump(2) + "\n";
}

}  // namespace studentrisk
