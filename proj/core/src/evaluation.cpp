#include "studentrisk/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "studentrisk/error.hpp"

namespace studentrisk {

namespace {

std::vector<std::size_t> columns_or_all(const Dataset& data,
                                        const std::vector<std::size_t>& columns) {
  if (!columns.empty()) return columns;
  return data.schema().predictor_indices();
}

void check_complete(const Dataset& data) {
  if (data.missing_count() > 0) {
    throw InputError("dataset has missing values; impute before evaluating");
  }
}

int count_class(const std::vector<int>& y, int label) {
  return static_cast<int>(std::count(y.begin(), y.end(), label));
}

double classification_error(const FittedClassifier& fitted, const Matrix& x,
                            const std::vector<int>& y) {
  std::size_t wrong = 0;
  for (std::size_t r = 0; r < x.rows; ++r) {
    if (fitted.predict(x.row(r)) != y[r]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(x.rows);
}

void validate_folds(const FoldAssignment& folds, std::size_t n) {
  if (folds.fold_of_row.size() != n) {
    throw InputError("fold assignment covers " +
                     std::to_string(folds.fold_of_row.size()) + " rows, dataset has " +
                     std::to_string(n));
  }
  if (folds.k < 2) throw InputError("cross-validation needs at least 2 folds");
  std::vector<std::size_t> sizes(static_cast<std::size_t>(folds.k), 0);
  for (int f : folds.fold_of_row) {
    if (f < 0 || f >= folds.k) throw InputError("fold index out of range");
    ++sizes[static_cast<std::size_t>(f)];
  }
  for (std::size_t f = 0; f < sizes.size(); ++f) {
    if (sizes[f] == 0) throw InputError("fold " + std::to_string(f) + " is empty");
  }
}

/// "41.59" style percentage with two decimals.
std::string fmt_pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
  return buf;
}

/// Condenses per-fold hyperparameter strings for a table cell. Identical
/// strings collapse to one; "key=value" strings with a shared key become
/// "key in {v1, v2}"; anything else is reported as fold-dependent.
std::string summarize_fold_hyperparameters(const std::vector<std::string>& values) {
  std::vector<std::string> distinct;
  for (const auto& v : values) {
    if (std::find(distinct.begin(), distinct.end(), v) == distinct.end()) {
      distinct.push_back(v);
    }
  }
  if (distinct.empty()) return "";
  if (distinct.size() == 1) return distinct.front();

  std::string key;
  std::vector<std::string> parts;
  for (const auto& v : distinct) {
    auto eq = v.find('=');
    if (eq == std::string::npos || v.find(',') != std::string::npos) {
      return "varies by fold";
    }
    std::string k = v.substr(0, eq);
    if (key.empty()) {
      key = k;
    } else if (k != key) {
      return "varies by fold";
    }
    parts.push_back(v.substr(eq + 1));
  }
  std::sort(parts.begin(), parts.end(), [](const std::string& a, const std::string& b) {
    double da = 0.0;
    double db = 0.0;
    try {
      da = std::stod(a);
      db = std::stod(b);
    } catch (...) {
      return a < b;
    }
    return da < db;
  });
  std::string out = key + " in {";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += ", ";
    out += parts[i];
  }
  out += "}";
  return out;
}

MethodSpec method_spec_for(Method method, const BenchmarkConfig& config,
                           MtryObjective forest_tuning) {
  MethodSpec spec;
  spec.method = method;
  spec.tuning_folds = config.tuning_folds;
  spec.forest_trees = config.forest_trees;
  spec.forest_tuning = forest_tuning;
  spec.svm_cost = config.svm_cost;
  return spec;
}

void append_diagnostic(std::string& diagnostic, const std::string& stage,
                       const std::string& message) {
  if (!diagnostic.empty()) diagnostic += "; ";
  diagnostic += stage + ": " + message;
}

}  // namespace

double majority_baseline(const std::vector<int>& y) {
  if (y.empty()) throw InputError("majority baseline needs at least one label");
  int ones = count_class(y, 1);
  int zeros = static_cast<int>(y.size()) - ones;
  return static_cast<double>(std::max(zeros, ones)) / static_cast<double>(y.size());
}

ResubstitutionResult resubstitution_error(
    const MethodSpec& spec, const Dataset& data, Rng& rng,
    const std::vector<std::size_t>& predictor_columns) {
  check_complete(data);
  auto columns = columns_or_all(data, predictor_columns);
  if (columns.empty()) throw InputError("no predictor columns to fit on");
  Matrix x = data.values(columns);
  std::vector<int> y = data.outcome_labels();
  FittedClassifier fitted = fit_classifier(spec, x, y, rng);
  ResubstitutionResult result;
  result.error = classification_error(fitted, x, y);
  result.hyperparameters = fitted.hyperparameters;
  return result;
}

MethodResult cross_validate(const MethodSpec& spec, const Dataset& data,
                            const FoldAssignment& folds, Rng& rng,
                            const std::vector<std::size_t>& predictor_columns,
                            const SelectionConfig* in_fold_selection) {
  check_complete(data);
  validate_folds(folds, data.n_rows());
  std::vector<std::size_t> fixed_columns;
  if (in_fold_selection == nullptr) {
    fixed_columns = columns_or_all(data, predictor_columns);
    if (fixed_columns.empty()) throw InputError("no predictor columns to fit on");
  }

  MethodResult result;
  result.method = spec.method;
  for (int f = 0; f < folds.k; ++f) {
    Dataset train_ds = data.subset(folds.training_rows(f));
    Dataset val_ds = data.subset(folds.validation_rows(f));
    std::vector<int> y_train = train_ds.outcome_labels();
    for (int label : {0, 1}) {
      if (count_class(y_train, label) == 0) {
        throw ModelError("training fold " + std::to_string(f) + " has no class " +
                         std::to_string(label) + " rows");
      }
    }

    std::vector<std::size_t> columns = fixed_columns;
    if (in_fold_selection != nullptr) {
      SelectionResult sel = select_variables(train_ds, *in_fold_selection);
      columns = sel.selected_columns;
      if (columns.empty()) {
        throw ModelError("variable selection kept nothing in training fold " +
                         std::to_string(f));
      }
    }

    Matrix x_train = train_ds.values(columns);
    Matrix x_val = val_ds.values(columns);
    std::vector<int> y_val = val_ds.outcome_labels();

    Rng fold_rng = rng.child(static_cast<std::uint64_t>(f));
    FittedClassifier fitted = fit_classifier(spec, x_train, y_train, fold_rng);
    result.fold_errors.push_back(classification_error(fitted, x_val, y_val));
    result.fold_hyperparameters.push_back(fitted.hyperparameters);
  }

  double sum = 0.0;
  for (double e : result.fold_errors) sum += e;
  double mean = sum / static_cast<double>(folds.k);
  double ss = 0.0;
  for (double e : result.fold_errors) ss += (e - mean) * (e - mean);
  result.cv_mean = mean;
  result.cv_std = std::sqrt(ss / static_cast<double>(folds.k - 1));
  return result;
}

EvaluationReport run_benchmark(const Dataset& data,
                               const std::vector<Method>& methods,
                               const BenchmarkConfig& config) {
  check_complete(data);
  if (config.folds < 2) throw InputError("benchmark needs at least 2 folds");
  std::vector<int> y = data.outcome_labels();

  std::vector<Method> battery;
  for (Method m : kBenchmarkOrder) {
    if (std::find(methods.begin(), methods.end(), m) != methods.end()) {
      battery.push_back(m);
    }
  }

  EvaluationReport report;
  report.dataset_name = config.dataset_name;
  report.n_rows = data.n_rows();
  report.success_rate =
      static_cast<double>(count_class(y, 1)) / static_cast<double>(y.size());
  report.baseline_accuracy = majority_baseline(y);
  report.selection_inside_folds = config.selection_inside_folds;
  report.folds = config.folds;
  report.seed = config.seed;

  std::vector<std::size_t> columns = data.schema().predictor_indices();
  if (config.select) {
    SelectionResult sel = select_variables(data, config.selection);
    columns = sel.selected_columns;
  }
  report.n_predictors = columns.size();
  for (std::size_t c : columns) {
    report.variables.push_back(data.schema().variables[c].name);
  }

  Rng root(config.seed);
  Rng fold_seed_rng = root.child(0);
  FoldAssignment assignment = stratified_folds(y, config.folds, fold_seed_rng);

  for (Method method : battery) {
    MethodResult result;
    result.method = method;
    auto id = static_cast<std::uint64_t>(method);

    if (method != Method::Knn) {
      if (columns.empty()) {
        append_diagnostic(result.diagnostic, "resubstitution", "no variables selected");
      } else {
        try {
          MethodSpec spec = method_spec_for(method, config, MtryObjective::Resubstitution);
          Rng resub_rng = root.child(100 + id);
          ResubstitutionResult resub =
              resubstitution_error(spec, data, resub_rng, columns);
          result.resub_error = resub.error;
          result.resub_hyperparameters = resub.hyperparameters;
        } catch (const std::exception& e) {
          append_diagnostic(result.diagnostic, "resubstitution", e.what());
        }
      }
    }

    if (columns.empty() && !config.selection_inside_folds) {
      append_diagnostic(result.diagnostic, "cross-validation", "no variables selected");
    } else {
      try {
        MethodSpec spec = method_spec_for(method, config, MtryObjective::CrossValidation);
        Rng cv_rng = root.child(200 + id);
        const SelectionConfig* in_fold =
            config.selection_inside_folds ? &config.selection : nullptr;
        MethodResult cv =
            cross_validate(spec, data, assignment, cv_rng, columns, in_fold);
        result.cv_mean = cv.cv_mean;
        result.cv_std = cv.cv_std;
        result.fold_errors = std::move(cv.fold_errors);
        result.fold_hyperparameters = std::move(cv.fold_hyperparameters);
      } catch (const std::exception& e) {
        append_diagnostic(result.diagnostic, "cross-validation", e.what());
      }
    }

    report.results.push_back(std::move(result));
  }

  std::optional<double> best_resub;
  std::optional<double> best_cv;
  for (const auto& r : report.results) {
    if (r.resub_error && (!best_resub || *r.resub_error < *best_resub)) {
      best_resub = r.resub_error;
    }
    if (r.cv_mean && (!best_cv || *r.cv_mean < *best_cv)) {
      best_cv = r.cv_mean;
    }
  }
  for (const auto& r : report.results) {
    if (r.resub_error && best_resub && *r.resub_error == *best_resub) {
      report.best_resubstitution.push_back(r.method);
    }
    if (r.cv_mean && best_cv && *r.cv_mean == *best_cv) {
      report.best_cv.push_back(r.method);
    }
  }
  return report;
}

bool EvaluationReport::any_failed() const {
  return std::any_of(results.begin(), results.end(),
                     [](const MethodResult& r) { return !r.diagnostic.empty(); });
}

std::string EvaluationReport::to_markdown() const {
  std::ostringstream out;
  out << "# Evaluation report: " << dataset_name << "\n\n";
  out << "- Students: " << n_rows << "\n";
  out << "- Success rate (%): " << fmt_pct(success_rate) << "\n";
  out << "- Majority baseline accuracy (%): " << fmt_pct(baseline_accuracy) << "\n";
  out << "- Variables used (" << n_predictors << "): ";
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (i > 0) out << ", ";
    out << variables[i];
  }
  out << "\n";
  out << "- Folds: " << folds << " (seed " << seed << "), selection inside folds: "
      << (selection_inside_folds ? "yes" : "no") << "\n";

  bool any_resub_row =
      std::any_of(results.begin(), results.end(),
                  [](const MethodResult& r) { return r.method != Method::Knn; });
  if (any_resub_row) {
    out << "\n## Resubstitution error (%)\n\n";
    out << "| Method | Error (%) | Details |\n";
    out << "| --- | --- | --- |\n";
    for (const auto& r : results) {
      if (r.method == Method::Knn) continue;
      out << "| " << method_display_name(r.method) << " | ";
      if (r.resub_error) {
        bool best = std::find(best_resubstitution.begin(), best_resubstitution.end(),
                              r.method) != best_resubstitution.end();
        if (best) out << "**" << fmt_pct(*r.resub_error) << "**";
        else out << fmt_pct(*r.resub_error);
        out << " | " << r.resub_hyperparameters << " |\n";
      } else {
        std::string why = r.diagnostic.empty() ? "" : r.diagnostic;
        out << "— | " << why << " |\n";
      }
    }
  }

  out << "\n## Cross-validation error (%)\n\n";
  out << "| Method | Error (%) | Details |\n";
  out << "| --- | --- | --- |\n";
  for (const auto& r : results) {
    out << "| " << method_display_name(r.method) << " | ";
    if (r.cv_mean) {
      bool best = std::find(best_cv.begin(), best_cv.end(), r.method) != best_cv.end();
      std::string cell = fmt_pct(*r.cv_mean) + " ± " + fmt_pct(*r.cv_std);
      if (best) out << "**" << cell << "**";
      else out << cell;
      out << " | " << summarize_fold_hyperparameters(r.fold_hyperparameters) << " |\n";
    } else {
      std::string why = r.diagnostic.empty() ? "" : r.diagnostic;
      out << "— | " << why << " |\n";
    }
  }
  return out.str();
}

std::string EvaluationReport::to_json_string() const {
  nlohmann::json doc;
  doc["dataset"] = dataset_name;
  doc["n_rows"] = n_rows;
  doc["n_predictors"] = n_predictors;
  doc["success_rate"] = success_rate;
  doc["baseline_accuracy"] = baseline_accuracy;
  doc["variables"] = variables;
  doc["selection_inside_folds"] = selection_inside_folds;
  doc["folds"] = folds;
  doc["seed"] = seed;

  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json row;
    row["method"] = method_key(r.method);
    row["display_name"] = method_display_name(r.method);
    if (r.resub_error) row["resubstitution_error"] = *r.resub_error;
    else row["resubstitution_error"] = nullptr;
    row["resubstitution_hyperparameters"] = r.resub_hyperparameters;
    if (r.cv_mean) row["cv_mean"] = *r.cv_mean;
    else row["cv_mean"] = nullptr;
    if (r.cv_std) row["cv_std"] = *r.cv_std;
    else row["cv_std"] = nullptr;
    row["fold_errors"] = r.fold_errors;
    row["fold_hyperparameters"] = r.fold_hyperparameters;
    row["diagnostic"] = r.diagnostic;
    rows.push_back(std::move(row));
  }
  doc["results"] = std::move(rows);

  auto keys = [](const std::vector<Method>& ms) {
    nlohmann::json arr = nlohmann::json::array();
    for (Method m : ms) arr.push_back(method_key(m));
    return arr;
  };
  doc["best_resubstitution"] = keys(best_resubstitution);
  doc["best_cv"] = keys(best_cv);
  return doc.dump(2);
}

}  // namespace studentrisk
