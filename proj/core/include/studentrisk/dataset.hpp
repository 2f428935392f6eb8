#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "studentrisk/matrix.hpp"

namespace studentrisk {

enum class VarKind { OrdinalDiscrete, Binary, ContinuousRaw };
enum class VarRole { Predictor, Outcome, Excluded };

std::string_view to_string(VarKind kind);
std::string_view to_string(VarRole role);
VarKind var_kind_from_string(std::string_view text);
VarRole var_role_from_string(std::string_view text);

/// One column of a study dataset.
///
/// Discrete kinds (ordinal-discrete, binary) carry an explicit, strictly
/// increasing list of integer level codes; every non-missing cell must be
/// one of them. Continuous columns accept any finite real and have no
/// level list.
struct VariableSpec {
  std::string name;
  VarKind kind = VarKind::OrdinalDiscrete;
  std::vector<int> levels;
  VarRole role = VarRole::Predictor;
  bool missing_allowed = true;

  bool is_discrete() const { return kind != VarKind::ContinuousRaw; }
  bool has_level(double value) const;
  std::string levels_label() const;
};

/// Ordered variable list describing a dataset's columns.
struct Schema {
  std::vector<VariableSpec> variables;

  /// Enforces the structural rules: at least one variable, unique names
  /// free of separator characters, discrete kinds with >= 2 strictly
  /// increasing levels (exactly 2 for binary), exactly one outcome which
  /// is binary with levels {0,1} and missing_allowed == false.
  /// Throws InputError on violation.
  void validate() const;

  std::size_t outcome_index() const;
  std::vector<std::size_t> predictor_indices() const;
  std::optional<std::size_t> index_of(std::string_view name) const;

  static Schema from_json(const std::string& text);
  std::string to_json_string() const;
};

using Cell = std::optional<double>;

/// Indices into a dataset's rows: distinct and strictly increasing.
/// Used for fold membership and row selections (not bootstrap resamples,
/// which contain duplicates).
using RowIndexSet = std::vector<std::size_t>;

/// Rectangular table of cells tied to a Schema. Row count is fixed at
/// construction and must be >= 1.
class Dataset {
 public:
  Dataset(Schema schema, std::size_t n_rows);

  /// Parses CSV with a header row naming every schema variable in order.
  /// The literal cell "NA" denotes a missing value and is rejected when
  /// the column's missing_allowed is false. Errors carry the 1-based data
  /// row and the column name.
  static Dataset from_csv(std::istream& csv, const Schema& schema);
  static Dataset from_csv_file(const std::string& path, const Schema& schema);

  /// Inverse of from_csv: header plus one line per row, missing cells as
  /// "NA", discrete cells as plain integers, continuous cells in
  /// shortest-round-trip notation.
  void to_csv(std::ostream& out) const;
  std::string to_csv_string() const;

  const Schema& schema() const { return schema_; }
  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return schema_.variables.size(); }

  Cell cell(std::size_t row, std::size_t col) const {
    return cells_[row * n_cols() + col];
  }
  /// Validates the value against the column spec (level membership,
  /// missing_allowed) before storing.
  void set_cell(std::size_t row, std::size_t col, Cell value);

  /// Copies the given rows into a new dataset with the same schema.
  Dataset subset(const RowIndexSet& rows) const;

  bool complete() const;
  std::size_t missing_count() const;
  /// True when column `col` has at least one missing cell.
  bool column_has_missing(std::size_t col) const;

  /// Outcome column as 0/1 ints. Outcome cells can never be missing.
  std::vector<int> outcome_labels() const;

  /// Raw values of the given columns as a matrix; requires every selected
  /// cell to be observed.
  Matrix values(const std::vector<std::size_t>& cols) const;

  /// Column `col` as a cell vector.
  std::vector<Cell> column(std::size_t col) const;

 private:
  Schema schema_;
  std::size_t n_rows_;
  std::vector<Cell> cells_;
};

/// Per-column standardization parameters produced by normalize().
struct NormalizationParams {
  std::vector<std::size_t> columns;
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<bool> constant;

  /// Standardizes one value under column slot j's parameters.
  double apply_value(double value, std::size_t j) const {
    return constant[j] ? 0.0 : (value - mean[j]) / stddev[j];
  }

  /// Standardizes a row; in is indexed by original column, out by slot.
  void apply_row(std::span<const double> in, std::span<double> out) const {
    for (std::size_t j = 0; j < columns.size(); ++j)
      out[j] = apply_value(in[columns[j]], j);
  }

  bool operator==(const NormalizationParams&) const = default;
};

/// Z-scores each requested column: (x - mean) / stddev with the sample
/// standard deviation (divisor n-1), both computed over observed cells
/// only. Constant columns emit 0.0 for every observed cell and are
/// flagged in the params. Missing cells pass through as NaN. Columns with
/// fewer than 2 observed cells are an error.
std::pair<Matrix, NormalizationParams> normalize(
    const Dataset& data, const std::vector<std::size_t>& columns);

/// All-columns overload.
std::pair<Matrix, NormalizationParams> normalize(const Dataset& data);

/// Matrix-level variant with the same rules; NaN cells are skipped in
/// the statistics and pass through. params.columns is 0..p-1.
std::pair<Matrix, NormalizationParams> normalize(const Matrix& data);

/// Reads the schema sidecar JSON, then the CSV against it.
Dataset load_dataset(std::istream& csv, std::istream& schema_json);
Dataset load_dataset_files(const std::string& csv_path,
                           const std::string& schema_path);

/// Equal-frequency recoding of one column into n_bins codes 1..n_bins.
/// Ranks use the minimum rank convention, so ties share a bin: the bin of
/// value x is 1 + floor((rank_min(x) - 1) * n_bins / n_observed). n_bins
/// must be 4 or 5; a column whose observed values are all equal cannot be
/// discretized. Missing cells pass through.
std::vector<std::optional<int>> discretize(const std::vector<Cell>& values,
                                           int n_bins);

}  // namespace studentrisk
