#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "studentrisk/dataset.hpp"
#include "studentrisk/matrix.hpp"

namespace studentrisk {

struct ImputationConfig {
  /// Neighbours consulted per missing cell. Fewer are used when fewer
  /// donors exist.
  std::size_t k = 10;
};

/// One filled-in cell: which donors were consulted and what value won.
/// Donors are listed by non-decreasing distance.
struct ImputationEntry {
  std::size_t row = 0;
  std::size_t column = 0;
  std::string column_name;
  std::vector<std::size_t> donor_rows;
  std::vector<double> donor_distances;
  double value = 0.0;
};

struct ImputationLog {
  std::size_t cells_imputed = 0;
  std::size_t rows_touched = 0;
  std::vector<ImputationEntry> entries;

  std::string to_json_string() const;
};

/// Distance between two rows of a standardized predictor matrix: Euclidean
/// over the dimensions observed in both rows, rescaled by sqrt(p/d) where p
/// is the total number of dimensions and d the number of shared observed
/// ones. Rows sharing no observed dimension are infinitely far apart.
double row_distance(const Matrix& standardized, std::size_t a, std::size_t b);

/// k-nearest-neighbour median imputation of missing predictor cells.
///
/// Distances are computed once, on the z-scored predictor columns of the
/// input (normalize() semantics), and never updated as cells fill in, so
/// the result does not depend on traversal order. For each missing cell
/// the donors are the k closest rows that observe that cell, ties on
/// distance broken by lower row index, and the imputed value is the lower
/// median of the donors' raw values. For discrete columns that order
/// statistic is one of the observed level codes, so imputed cells always
/// satisfy the schema. Non-predictor columns are left untouched.
///
/// Throws ModelError when a missing cell has no donor at finite distance.
std::pair<Dataset, ImputationLog> impute_missing(
    const Dataset& data, const ImputationConfig& config = {});

}  // namespace studentrisk
