#include "studentrisk/imputation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "studentrisk/error.hpp"

namespace studentrisk {

double row_distance(const Matrix& standardized, std::size_t a,
                    std::size_t b) {
  const std::size_t p = standardized.cols;
  double sum = 0.0;
  std::size_t shared = 0;
  for (std::size_t c = 0; c < p; ++c) {
    const double va = standardized.at(a, c);
    const double vb = standardized.at(b, c);
    if (std::isnan(va) || std::isnan(vb)) continue;
    const double diff = va - vb;
    sum += diff * diff;
    ++shared;
  }
  if (shared == 0) return std::numeric_limits<double>::infinity();
  return std::sqrt(sum * static_cast<double>(p) / static_cast<double>(shared));
}

namespace {

/// Lower median: the ceil(m/2)-th smallest of m values.
double lower_median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

}  // namespace

std::pair<Dataset, ImputationLog> impute_missing(const Dataset& data,
                                                 const ImputationConfig& config) {
  if (config.k == 0) throw InputError("imputation needs k >= 1 neighbours");
  const std::vector<std::size_t> predictors = data.schema().predictor_indices();
  const std::size_t n = data.n_rows();

  Dataset completed = data;
  ImputationLog log;
  if (predictors.empty()) return {std::move(completed), std::move(log)};

  const auto [standardized, params] = normalize(data, predictors);

  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(n);
  std::vector<double> donor_values;
  std::vector<std::size_t> donor_rows;

  for (std::size_t r = 0; r < n; ++r) {
    bool touched = false;
    for (std::size_t j = 0; j < predictors.size(); ++j) {
      const std::size_t col = predictors[j];
      if (data.cell(r, col).has_value()) continue;

      order.clear();
      for (std::size_t other = 0; other < n; ++other) {
        if (other == r) continue;
        const Cell donor_cell = data.cell(other, col);
        if (!donor_cell.has_value()) continue;
        const double dist = row_distance(standardized, r, other);
        if (std::isinf(dist)) continue;
        order.emplace_back(dist, other);
      }
      const std::string& name = data.schema().variables[col].name;
      if (order.empty())
        throw ModelError("no donor rows available to impute column '" + name +
                         "' at data row " + std::to_string(r + 1));
      std::sort(order.begin(), order.end());

      const std::size_t take = std::min(config.k, order.size());
      donor_values.clear();
      donor_rows.clear();
      std::vector<double> donor_distances;
      for (std::size_t i = 0; i < take; ++i) {
        donor_rows.push_back(order[i].second);
        donor_distances.push_back(order[i].first);
        donor_values.push_back(*data.cell(order[i].second, col));
      }
      const double value = lower_median(donor_values);
      completed.set_cell(r, col, value);

      ImputationEntry entry;
      entry.row = r;
      entry.column = col;
      entry.column_name = name;
      entry.donor_rows = donor_rows;
      entry.donor_distances = std::move(donor_distances);
      entry.value = value;
      log.entries.push_back(std::move(entry));
      ++log.cells_imputed;
      touched = true;
    }
    if (touched) ++log.rows_touched;
  }
  return {std::move(completed), std::move(log)};
}

std::string ImputationLog::to_json_string() const {
  nlohmann::json entries_json = nlohmann::json::array();
  for (const ImputationEntry& entry : entries) {
    nlohmann::json item;
    item["row"] = entry.row;
    item["column"] = entry.column_name;
    item["donors"] = entry.donor_rows;
    item["distances"] = entry.donor_distances;
    item["value"] = entry.value;
    entries_json.push_back(std::move(item));
  }
  nlohmann::json doc;
  doc["cells_imputed"] = cells_imputed;
  doc["rows_touched"] = rows_touched;
  doc["entries"] = std::move(entries_json);
  return doc.dump(2) + "\n";
}

}  // namespace studentrisk
