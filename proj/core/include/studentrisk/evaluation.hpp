#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "studentrisk/association.hpp"
#include "studentrisk/classifier.hpp"
#include "studentrisk/dataset.hpp"
#include "studentrisk/folds.hpp"
#include "studentrisk/rng.hpp"

namespace studentrisk {

/// Fraction of rows the best constant prediction gets right:
/// max(count(0), count(1)) / n.
double majority_baseline(const std::vector<int>& y);

struct ResubstitutionResult {
  /// Misclassified fraction when fitting and predicting on the same rows.
  double error = 0.0;
  /// Hyperparameters the fit chose, as a display string.
  std::string hyperparameters;
};

/// Fits the method on every row and scores it on the same rows. The
/// dataset must be complete; pass the predictor columns to use, or leave
/// the list empty for all predictors.
ResubstitutionResult resubstitution_error(
    const MethodSpec& spec, const Dataset& data, Rng& rng,
    const std::vector<std::size_t>& predictor_columns = {});

/// Per-method evaluation outcome. Absent optionals mean the run was not
/// attempted or failed; `diagnostic` says which and why.
struct MethodResult {
  Method method = Method::Tree1;
  std::optional<double> resub_error;
  std::string resub_hyperparameters;
  std::optional<double> cv_mean;
  std::optional<double> cv_std;
  /// Held-out error per fold, in fold order.
  std::vector<double> fold_errors;
  /// Hyperparameters chosen in each fold's training fit.
  std::vector<std::string> fold_hyperparameters;
  std::string diagnostic;
};

/// Stratified k-fold cross-validation of one method. Each fold fits on
/// the other k-1 folds, tuning any hyperparameters on training-fold data
/// only, and scores the held-out fold. cv_mean is the arithmetic mean of
/// the per-fold errors and cv_std their sample standard deviation
/// (divisor k-1). Per-fold fits draw from rng.child(fold).
///
/// With `in_fold_selection` set, variable selection reruns inside every
/// training fold and `predictor_columns` is ignored; otherwise the given
/// columns (or all predictors when empty) are used as-is.
///
/// Throws ModelError when a training fold lacks one of the classes or an
/// in-fold selection keeps no variables.
MethodResult cross_validate(const MethodSpec& spec, const Dataset& data,
                            const FoldAssignment& folds, Rng& rng,
                            const std::vector<std::size_t>& predictor_columns = {},
                            const SelectionConfig* in_fold_selection = nullptr);

struct BenchmarkConfig {
  std::string dataset_name;
  int folds = 10;
  /// Folds of the nested split used to tune mtry and k inside a training
  /// fold.
  int tuning_folds = 10;
  std::size_t forest_trees = 1000;
  double svm_cost = 1.0;
  /// Screen variables before evaluating. When false every predictor is
  /// used.
  bool select = true;
  /// Rerun the screen inside each training fold instead of once up
  /// front. The up-front selection is still reported for reference, and
  /// resubstitution always uses it.
  bool selection_inside_folds = false;
  SelectionConfig selection;
  std::uint64_t seed = 0;
};

/// Benchmark results over a method battery, with enough provenance to
/// reproduce the run.
struct EvaluationReport {
  std::string dataset_name;
  std::size_t n_rows = 0;
  std::size_t n_predictors = 0;
  /// Fraction of class-1 rows.
  double success_rate = 0.0;
  double baseline_accuracy = 0.0;
  /// Names of the predictor columns used (post-selection).
  std::vector<std::string> variables;
  bool selection_inside_folds = false;
  int folds = 0;
  std::uint64_t seed = 0;
  /// One entry per requested method, in canonical battery order.
  std::vector<MethodResult> results;
  /// Methods tied for the lowest resubstitution error.
  std::vector<Method> best_resubstitution;
  /// Methods tied for the lowest cv_mean.
  std::vector<Method> best_cv;

  /// True when any attempted run produced a diagnostic instead of a
  /// result.
  bool any_failed() const;

  /// Two tables (resubstitution and cross-validation) with percentages
  /// to two decimals, minima in bold, and failed cells dashed. The
  /// nearest-neighbour method appears only in the cross-validation
  /// table.
  std::string to_markdown() const;
  /// Same content with raw fractions and nulls for absent values.
  std::string to_json_string() const;
};

/// Runs the requested methods through resubstitution and
/// cross-validation on a complete dataset; pass kBenchmarkOrder for the
/// full battery. Duplicates are ignored and rows always come out in
/// battery order. An empty list still produces the header fields and
/// baseline. Per-method failures become diagnostics in the report rather
/// than aborting the run. Fold assignment draws from child stream 0 of
/// the config seed, each method's resubstitution fit from stream
/// 100 + method id, and its cross-validation from stream 200 + method
/// id.
EvaluationReport run_benchmark(const Dataset& data,
                               const std::vector<Method>& methods,
                               const BenchmarkConfig& config);

}  // namespace studentrisk
