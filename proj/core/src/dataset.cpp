#include "studentrisk/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "studentrisk/error.hpp"

namespace studentrisk {

namespace {

constexpr std::string_view kMissingMarker = "NA";

std::string quote(std::string_view s) { return "'" + std::string(s) + "'"; }

/// Splits one CSV line on bare commas. The format has no quoting; schema
/// validation rejects names that would need it.
std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.emplace_back(line.substr(start));
      break;
    }
    cells.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

bool parse_int(std::string_view text, long long& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_double(std::string_view text, double& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

/// Shortest decimal text that round-trips back to the same double.
std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

std::string_view to_string(VarKind kind) {
  switch (kind) {
    case VarKind::OrdinalDiscrete:
      return "ordinal-discrete";
    case VarKind::Binary:
      return "binary";
    case VarKind::ContinuousRaw:
      return "continuous-raw";
  }
  return "?";
}

std::string_view to_string(VarRole role) {
  switch (role) {
    case VarRole::Predictor:
      return "predictor";
    case VarRole::Outcome:
      return "outcome";
    case VarRole::Excluded:
      return "excluded";
  }
  return "?";
}

VarKind var_kind_from_string(std::string_view text) {
  if (text == "ordinal-discrete") return VarKind::OrdinalDiscrete;
  if (text == "binary") return VarKind::Binary;
  if (text == "continuous-raw") return VarKind::ContinuousRaw;
  throw InputError("unknown variable kind " + quote(text));
}

VarRole var_role_from_string(std::string_view text) {
  if (text == "predictor") return VarRole::Predictor;
  if (text == "outcome") return VarRole::Outcome;
  if (text == "excluded") return VarRole::Excluded;
  throw InputError("unknown variable role " + quote(text));
}

bool VariableSpec::has_level(double value) const {
  if (!is_discrete()) return true;
  if (value != std::floor(value)) return false;
  if (value < levels.front() || value > levels.back()) return false;
  const int code = static_cast<int>(value);
  return std::binary_search(levels.begin(), levels.end(), code);
}

std::string VariableSpec::levels_label() const {
  std::string label = "{";
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i > 0) label += ",";
    label += std::to_string(levels[i]);
  }
  return label + "}";
}

void Schema::validate() const {
  if (variables.empty()) throw InputError("schema has no variables");
  std::size_t outcomes = 0;
  for (std::size_t i = 0; i < variables.size(); ++i) {
    const VariableSpec& var = variables[i];
    if (var.name.empty())
      throw InputError("variable " + std::to_string(i) + " has an empty name");
    if (var.name.find_first_of(",\"\r\n") != std::string::npos)
      throw InputError("variable name " + quote(var.name) +
                       " contains a separator character");
    for (std::size_t j = i + 1; j < variables.size(); ++j) {
      if (variables[j].name == var.name)
        throw InputError("duplicate variable name " + quote(var.name));
    }
    if (var.is_discrete()) {
      if (var.levels.size() < 2)
        throw InputError("variable " + quote(var.name) +
                         " needs at least 2 levels");
      if (var.kind == VarKind::Binary && var.levels.size() != 2)
        throw InputError("binary variable " + quote(var.name) +
                         " must have exactly 2 levels");
      for (std::size_t j = 1; j < var.levels.size(); ++j) {
        if (var.levels[j] <= var.levels[j - 1])
          throw InputError("levels of " + quote(var.name) +
                           " are not strictly increasing");
      }
    } else if (!var.levels.empty()) {
      throw InputError("continuous variable " + quote(var.name) +
                       " cannot list levels");
    }
    if (var.role == VarRole::Outcome) {
      ++outcomes;
      if (var.kind != VarKind::Binary || var.levels != std::vector<int>{0, 1})
        throw InputError("outcome " + quote(var.name) +
                         " must be binary with levels {0,1}");
      if (var.missing_allowed)
        throw InputError("outcome " + quote(var.name) +
                         " cannot allow missing values");
    }
  }
  if (outcomes != 1)
    throw InputError("schema must declare exactly one outcome, found " +
                     std::to_string(outcomes));
}

std::size_t Schema::outcome_index() const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].role == VarRole::Outcome) return i;
  }
  throw InputError("schema has no outcome variable");
}

std::vector<std::size_t> Schema::predictor_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].role == VarRole::Predictor) out.push_back(i);
  }
  return out;
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].name == name) return i;
  }
  return std::nullopt;
}

Schema Schema::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw InputError(std::string("schema is not valid JSON: ") + err.what());
  }
  if (!doc.is_object() || !doc.contains("variables") ||
      !doc["variables"].is_array())
    throw InputError("schema JSON must be an object with a 'variables' array");
  Schema schema;
  for (const nlohmann::json& entry : doc["variables"]) {
    if (!entry.is_object())
      throw InputError("schema variable entries must be objects");
    VariableSpec var;
    if (!entry.contains("name") || !entry["name"].is_string())
      throw InputError("schema variable is missing a string 'name'");
    var.name = entry["name"].get<std::string>();
    if (!entry.contains("kind") || !entry["kind"].is_string())
      throw InputError("variable " + quote(var.name) +
                       " is missing a string 'kind'");
    var.kind = var_kind_from_string(entry["kind"].get<std::string>());
    if (entry.contains("levels")) {
      if (!entry["levels"].is_array())
        throw InputError("levels of " + quote(var.name) + " must be an array");
      for (const nlohmann::json& level : entry["levels"]) {
        if (!level.is_number_integer())
          throw InputError("levels of " + quote(var.name) +
                           " must be integers");
        var.levels.push_back(level.get<int>());
      }
    }
    if (entry.contains("role")) {
      if (!entry["role"].is_string())
        throw InputError("role of " + quote(var.name) + " must be a string");
      var.role = var_role_from_string(entry["role"].get<std::string>());
    }
    if (entry.contains("missing_allowed")) {
      if (!entry["missing_allowed"].is_boolean())
        throw InputError("missing_allowed of " + quote(var.name) +
                         " must be a boolean");
      var.missing_allowed = entry["missing_allowed"].get<bool>();
    }
    schema.variables.push_back(std::move(var));
  }
  schema.validate();
  return schema;
}

std::string Schema::to_json_string() const {
  nlohmann::json vars = nlohmann::json::array();
  for (const VariableSpec& var : variables) {
    nlohmann::json entry;
    entry["name"] = var.name;
    entry["kind"] = std::string(to_string(var.kind));
    if (var.is_discrete()) entry["levels"] = var.levels;
    entry["role"] = std::string(to_string(var.role));
    entry["missing_allowed"] = var.missing_allowed;
    vars.push_back(std::move(entry));
  }
  nlohmann::json doc;
  doc["variables"] = std::move(vars);
  return doc.dump(2) + "\n";
}

Dataset::Dataset(Schema schema, std::size_t n_rows)
    : schema_(std::move(schema)), n_rows_(n_rows) {
  schema_.validate();
  if (n_rows_ == 0) throw InputError("dataset must have at least one row");
  cells_.assign(n_rows_ * schema_.variables.size(), std::nullopt);
}

Dataset Dataset::from_csv(std::istream& csv, const Schema& schema) {
  schema.validate();
  std::string line;
  if (!std::getline(csv, line)) throw InputError("CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const std::vector<std::string> header = split_line(line);
  const std::size_t n_cols = schema.variables.size();
  if (header.size() != n_cols)
    throw InputError("CSV header has " + std::to_string(header.size()) +
                     " columns, schema expects " + std::to_string(n_cols));
  for (std::size_t c = 0; c < n_cols; ++c) {
    if (header[c] != schema.variables[c].name)
      throw InputError("CSV column " + std::to_string(c + 1) + " is " +
                       quote(header[c]) + ", schema expects " +
                       quote(schema.variables[c].name));
  }

  std::vector<std::vector<std::string>> rows;
  while (std::getline(csv, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && csv.peek() == std::istream::traits_type::eof()) break;
    rows.push_back(split_line(line));
  }
  if (rows.empty()) throw InputError("CSV has a header but no data rows");

  Dataset data(schema, rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::vector<std::string>& cells = rows[r];
    if (cells.size() != n_cols)
      throw InputError("data row " + std::to_string(r + 1) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(n_cols));
    for (std::size_t c = 0; c < n_cols; ++c) {
      const VariableSpec& var = schema.variables[c];
      const std::string& text = cells[c];
      const std::string where = "data row " + std::to_string(r + 1) +
                                ", column " + quote(var.name);
      if (text == kMissingMarker) {
        if (!var.missing_allowed)
          throw InputError("missing value at " + where +
                           ", which does not allow missing values");
        continue;
      }
      double value = 0.0;
      if (var.is_discrete()) {
        long long code = 0;
        if (!parse_int(text, code))
          throw InputError(quote(text) + " at " + where +
                           " is not an integer level code");
        value = static_cast<double>(code);
        if (!var.has_level(value))
          throw InputError("level " + text + " at " + where +
                           " is outside " + var.levels_label());
      } else {
        if (!parse_double(text, value))
          throw InputError(quote(text) + " at " + where +
                           " is not a finite number");
      }
      data.cells_[r * n_cols + c] = value;
    }
  }
  return data;
}

Dataset Dataset::from_csv_file(const std::string& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + quote(path));
  return from_csv(in, schema);
}

void Dataset::to_csv(std::ostream& out) const {
  const std::size_t n_cols = schema_.variables.size();
  for (std::size_t c = 0; c < n_cols; ++c) {
    if (c > 0) out << ',';
    out << schema_.variables[c].name;
  }
  out << '\n';
  for (std::size_t r = 0; r < n_rows_; ++r) {
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (c > 0) out << ',';
      const Cell& cell = cells_[r * n_cols + c];
      if (!cell.has_value()) {
        out << kMissingMarker;
      } else if (schema_.variables[c].is_discrete()) {
        out << static_cast<long long>(*cell);
      } else {
        out << format_double(*cell);
      }
    }
    out << '\n';
  }
}

std::string Dataset::to_csv_string() const {
  std::ostringstream out;
  to_csv(out);
  return out.str();
}

void Dataset::set_cell(std::size_t row, std::size_t col, Cell value) {
  const VariableSpec& var = schema_.variables[col];
  if (!value.has_value()) {
    if (!var.missing_allowed)
      throw InputError("column " + quote(var.name) +
                       " does not allow missing values");
  } else {
    if (!std::isfinite(*value))
      throw InputError("column " + quote(var.name) +
                       " given a non-finite value");
    if (var.is_discrete() && !var.has_level(*value))
      throw InputError("value " + format_double(*value) + " is outside " +
                       var.levels_label() + " for column " + quote(var.name));
  }
  cells_[row * n_cols() + col] = value;
}

Dataset Dataset::subset(const RowIndexSet& rows) const {
  if (rows.empty()) throw InputError("row subset must be non-empty");
  Dataset out(schema_, rows.size());
  const std::size_t p = n_cols();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= n_rows_) throw InputError("row index out of range");
    for (std::size_t c = 0; c < p; ++c)
      out.cells_[i * p + c] = cells_[rows[i] * p + c];
  }
  return out;
}

bool Dataset::complete() const { return missing_count() == 0; }

std::size_t Dataset::missing_count() const {
  std::size_t count = 0;
  for (const Cell& cell : cells_) {
    if (!cell.has_value()) ++count;
  }
  return count;
}

bool Dataset::column_has_missing(std::size_t col) const {
  for (std::size_t r = 0; r < n_rows_; ++r) {
    if (!cells_[r * n_cols() + col].has_value()) return true;
  }
  return false;
}

std::vector<int> Dataset::outcome_labels() const {
  const std::size_t col = schema_.outcome_index();
  std::vector<int> labels(n_rows_);
  for (std::size_t r = 0; r < n_rows_; ++r) {
    const Cell& cell = cells_[r * n_cols() + col];
    if (!cell.has_value())
      throw InputError("outcome column has a missing value at data row " +
                       std::to_string(r + 1));
    labels[r] = static_cast<int>(*cell);
  }
  return labels;
}

Matrix Dataset::values(const std::vector<std::size_t>& cols) const {
  Matrix out(n_rows_, cols.size());
  for (std::size_t r = 0; r < n_rows_; ++r) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const Cell& cell = cells_[r * n_cols() + cols[j]];
      if (!cell.has_value())
        throw InputError("column " + quote(schema_.variables[cols[j]].name) +
                         " has a missing value at data row " +
                         std::to_string(r + 1) +
                         "; impute before extracting values");
      out.at(r, j) = *cell;
    }
  }
  return out;
}

std::vector<Cell> Dataset::column(std::size_t col) const {
  std::vector<Cell> out(n_rows_);
  for (std::size_t r = 0; r < n_rows_; ++r)
    out[r] = cells_[r * n_cols() + col];
  return out;
}

Dataset load_dataset(std::istream& csv, std::istream& schema_json) {
  std::ostringstream text;
  text << schema_json.rdbuf();
  return Dataset::from_csv(csv, Schema::from_json(text.str()));
}

Dataset load_dataset_files(const std::string& csv_path,
                           const std::string& schema_path) {
  std::ifstream schema_in(schema_path);
  if (!schema_in) throw InputError("cannot open " + quote(schema_path));
  std::ostringstream text;
  text << schema_in.rdbuf();
  return Dataset::from_csv_file(csv_path, Schema::from_json(text.str()));
}

std::pair<Matrix, NormalizationParams> normalize(
    const Dataset& data, const std::vector<std::size_t>& columns) {
  const std::size_t n = data.n_rows();
  Matrix out(n, columns.size());
  NormalizationParams params;
  params.columns = columns;
  params.mean.resize(columns.size());
  params.stddev.resize(columns.size());
  params.constant.resize(columns.size());

  for (std::size_t j = 0; j < columns.size(); ++j) {
    const std::size_t col = columns[j];
    double sum = 0.0;
    std::size_t observed = 0;
    for (std::size_t r = 0; r < n; ++r) {
      const Cell cell = data.cell(r, col);
      if (cell.has_value()) {
        sum += *cell;
        ++observed;
      }
    }
    const std::string& name = data.schema().variables[col].name;
    if (observed < 2)
      throw InputError("column " + quote(name) +
                       " has fewer than 2 observed values");
    const double mean = sum / static_cast<double>(observed);
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const Cell cell = data.cell(r, col);
      if (cell.has_value()) ss += (*cell - mean) * (*cell - mean);
    }
    const bool constant = ss == 0.0;
    const double stddev =
        constant ? 0.0 : std::sqrt(ss / static_cast<double>(observed - 1));
    params.mean[j] = mean;
    params.stddev[j] = stddev;
    params.constant[j] = constant;
    for (std::size_t r = 0; r < n; ++r) {
      const Cell cell = data.cell(r, col);
      if (!cell.has_value()) {
        out.at(r, j) = std::numeric_limits<double>::quiet_NaN();
      } else if (constant) {
        out.at(r, j) = 0.0;
      } else {
        out.at(r, j) = (*cell - mean) / stddev;
      }
    }
  }
  return {std::move(out), std::move(params)};
}

std::pair<Matrix, NormalizationParams> normalize(const Dataset& data) {
  std::vector<std::size_t> columns(data.n_cols());
  for (std::size_t c = 0; c < columns.size(); ++c) columns[c] = c;
  return normalize(data, columns);
}

std::pair<Matrix, NormalizationParams> normalize(const Matrix& data) {
  Matrix out(data.rows, data.cols);
  NormalizationParams params;
  params.columns.resize(data.cols);
  params.mean.resize(data.cols);
  params.stddev.resize(data.cols);
  params.constant.resize(data.cols);

  for (std::size_t j = 0; j < data.cols; ++j) {
    params.columns[j] = j;
    double sum = 0.0;
    std::size_t observed = 0;
    for (std::size_t r = 0; r < data.rows; ++r) {
      const double v = data.at(r, j);
      if (!std::isnan(v)) {
        sum += v;
        ++observed;
      }
    }
    if (observed < 2)
      throw InputError("column " + std::to_string(j) +
                       " has fewer than 2 observed values");
    const double mean = sum / static_cast<double>(observed);
    double ss = 0.0;
    for (std::size_t r = 0; r < data.rows; ++r) {
      const double v = data.at(r, j);
      if (!std::isnan(v)) ss += (v - mean) * (v - mean);
    }
    const bool constant = ss == 0.0;
    const double stddev =
        constant ? 0.0 : std::sqrt(ss / static_cast<double>(observed - 1));
    params.mean[j] = mean;
    params.stddev[j] = stddev;
    params.constant[j] = constant;
    for (std::size_t r = 0; r < data.rows; ++r) {
      const double v = data.at(r, j);
      if (std::isnan(v)) {
        out.at(r, j) = std::numeric_limits<double>::quiet_NaN();
      } else {
        out.at(r, j) = constant ? 0.0 : (v - mean) / stddev;
      }
    }
  }
  return {std::move(out), std::move(params)};
}

std::vector<std::optional<int>> discretize(const std::vector<Cell>& values,
                                           int n_bins) {
  if (n_bins != 4 && n_bins != 5)
    throw InputError("discretization supports 4 or 5 bins, got " +
                     std::to_string(n_bins));
  std::vector<double> observed;
  for (const Cell& cell : values) {
    if (cell.has_value()) observed.push_back(*cell);
  }
  if (observed.empty())
    throw InputError("cannot discretize a column with no observed values");
  std::sort(observed.begin(), observed.end());
  if (observed.front() == observed.back())
    throw InputError("cannot discretize a constant column");

  const std::int64_t n_obs = static_cast<std::int64_t>(observed.size());
  std::vector<std::optional<int>> codes(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i].has_value()) continue;
    // Minimum rank of the value: 1 + number of observed values below it.
    const std::int64_t rank_min =
        1 + (std::lower_bound(observed.begin(), observed.end(), *values[i]) -
             observed.begin());
    codes[i] = static_cast<int>(1 + ((rank_min - 1) * n_bins) / n_obs);
  }
  return codes;
}

}  // namespace studentrisk
