#include "studentrisk/classifier.hpp"

#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "studentrisk/error.hpp"
#include "tree_grow.hpp"

namespace studentrisk {

std::string_view method_key(Method method) {
  switch (method) {
    case Method::Tree1: return "tree1";
    case Method::Tree2: return "tree2";
    case Method::Lda: return "lda";
    case Method::Qda: return "qda";
    case Method::Forest: return "forest";
    case Method::Logistic: return "logistic";
    case Method::Svm1: return "svm1";
    case Method::Svm2: return "svm2";
    case Method::Knn: return "knn";
  }
  throw InputError("unknown method tag");
}

std::string_view method_display_name(Method method) {
  switch (method) {
    case Method::Tree1: return "Decision Tree 1";
    case Method::Tree2: return "Decision Tree 2";
    case Method::Lda: return "LDA";
    case Method::Qda: return "QDA";
    case Method::Forest: return "Random Forests";
    case Method::Logistic: return "Logistic Regression";
    case Method::Svm1: return "SVM 1";
    case Method::Svm2: return "SVM 2";
    case Method::Knn: return "k-NN";
  }
  throw InputError("unknown method tag");
}

std::optional<Method> method_from_key(std::string_view key) {
  for (const Method method : kBenchmarkOrder) {
    if (method_key(method) == key) return method;
  }
  return std::nullopt;
}

namespace {

std::string format_value(const char* pattern, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), pattern, value);
  return buffer;
}

bool needs_standardization(Method method) {
  switch (method) {
    case Method::Lda:
    case Method::Qda:
    case Method::Logistic:
    case Method::Svm1:
    case Method::Svm2:
    case Method::Knn:
      return true;
    default:
      return false;
  }
}

FittedClassifier fit_pruned_tree(const MethodSpec& spec, const Matrix& x,
                                 const std::vector<int>& y, Rng& rng,
                                 PruneVariant variant) {
  const DecisionTree tree = grow_tree(x, y, spec.tree_growth);
  const PruningPath path = pruning_path(tree, x, y);
  const PruneResult pruned =
      prune(path, x, y, variant, spec.tuning_folds, rng);
  FittedClassifier fitted;
  fitted.model = pruned.tree;
  fitted.hyperparameters =
      "alpha=" + format_value("%.6g", pruned.alpha) +
      ", leaves=" + std::to_string(pruned.tree.leaf_count());
  return fitted;
}

}  // namespace

int FittedClassifier::predict(std::span<const double> row) const {
  for (const double value : row) {
    if (std::isnan(value))
      throw InputError("prediction rows must be fully observed");
  }
  std::vector<double> standardized;
  std::span<const double> features = row;
  if (!standardization.columns.empty()) {
    standardized.resize(standardization.columns.size());
    standardization.apply_row(row, standardized);
    features = standardized;
  }
  return std::visit(
      [&](const auto& m) -> int {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, RandomForest>) {
          return predict_forest(m, features);
        } else if constexpr (std::is_same_v<T, KnnModel>) {
          return knn_predict(m, features);
        } else {
          return m.predict(features);
        }
      },
      model);
}

std::optional<double> FittedClassifier::success_probability(
    std::span<const double> row) const {
  std::vector<double> standardized;
  std::span<const double> features = row;
  if (!standardization.columns.empty()) {
    standardized.resize(standardization.columns.size());
    standardization.apply_row(row, standardized);
    features = standardized;
  }
  if (const auto* logistic = std::get_if<LogisticModel>(&model))
    return logistic->probability(features);
  if (const auto* forest = std::get_if<RandomForest>(&model))
    return forest->vote_fraction(features);
  return std::nullopt;
}

FittedClassifier fit_classifier(const MethodSpec& spec, const Matrix& x,
                                const std::vector<int>& y, Rng& rng) {
  FittedClassifier fitted;
  Matrix standardized;
  const Matrix* features = &x;
  if (needs_standardization(spec.method)) {
    auto [matrix, params] = normalize(x);
    standardized = std::move(matrix);
    fitted.standardization = std::move(params);
    features = &standardized;
  }

  switch (spec.method) {
    case Method::Tree1:
      fitted = fit_pruned_tree(spec, x, y, rng, PruneVariant::MinCv);
      break;
    case Method::Tree2:
      fitted = fit_pruned_tree(spec, x, y, rng, PruneVariant::OneSe);
      break;
    case Method::Lda: {
      LdaModel model = fit_lda(*features, y);
      fitted.hyperparameters = model.ridged ? "ridged" : "no ridge";
      fitted.model = std::move(model);
      break;
    }
    case Method::Qda: {
      QdaModel model = fit_qda(*features, y);
      fitted.hyperparameters =
          model.ridged[0] || model.ridged[1] ? "ridged" : "no ridge";
      fitted.model = std::move(model);
      break;
    }
    case Method::Forest: {
      const MtryResult tuned =
          optimize_mtry(x, y, spec.forest_trees, rng.child(1),
                        spec.forest_tuning, spec.tuning_folds);
      RandomForest model =
          fit_forest(x, y, spec.forest_trees, tuned.mtry, rng.child(2));
      fitted.hyperparameters = "mtry=" + std::to_string(tuned.mtry);
      fitted.model = std::move(model);
      break;
    }
    case Method::Logistic: {
      LogisticModel model = fit_logistic(*features, y);
      fitted.hyperparameters =
          std::string(model.converged ? "converged" : "not converged") +
          " in " + std::to_string(model.iterations) + " iterations";
      fitted.model = std::move(model);
      break;
    }
    case Method::Svm1:
    case Method::Svm2: {
      const int variant = spec.method == Method::Svm1 ? 1 : 2;
      SvmModel model = fit_svm(*features, y, variant, spec.svm_cost);
      fitted.hyperparameters = "gamma=" + format_value("%.6g", model.gamma) +
                               ", C=" + format_value("%g", model.cost);
      fitted.model = std::move(model);
      break;
    }
    case Method::Knn: {
      const KnnTuning tuned = optimize_k(*features, y, spec.tuning_folds, rng);
      KnnModel model = fit_knn(*features, y, tuned.k);
      fitted.hyperparameters = "k=" + std::to_string(tuned.k);
      fitted.model = std::move(model);
      break;
    }
  }

  fitted.method = spec.method;
  return fitted;
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < m.cols; ++c) row.push_back(m.at(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json standardization_to_json(const NormalizationParams& params) {
  nlohmann::json out;
  out["columns"] = params.columns;
  out["mean"] = params.mean;
  out["stddev"] = params.stddev;
  out["constant"] = std::vector<int>(params.constant.begin(),
                                     params.constant.end());
  return out;
}

struct ModelJsonBuilder {
  nlohmann::json operator()(const DecisionTree& tree) const {
    return detail::tree_to_json(tree);
  }
  nlohmann::json operator()(const RandomForest& forest) const {
    // Trees are reproducible from the seed, so the per-tree structures
    // stay out of the classifier document.
    nlohmann::json out;
    out["seed"] = forest.seed;
    out["mtry"] = forest.mtry;
    out["n_trees"] = forest.n_trees();
    out["bootstrap"] = forest.config.bootstrap;
    out["min_split"] = forest.config.growth.min_split;
    out["min_bucket"] = forest.config.growth.min_bucket;
    return out;
  }
  nlohmann::json operator()(const LdaModel& model) const {
    nlohmann::json out;
    out["means"] = matrix_to_json(model.means);
    out["covariance"] = matrix_to_json(model.covariance);
    out["inverse"] = matrix_to_json(model.inverse);
    out["log_prior"] = model.log_prior;
    out["ridged"] = model.ridged;
    return out;
  }
  nlohmann::json operator()(const QdaModel& model) const {
    nlohmann::json out;
    out["means"] = matrix_to_json(model.means);
    out["covariance"] = {matrix_to_json(model.covariance[0]),
                         matrix_to_json(model.covariance[1])};
    out["inverse"] = {matrix_to_json(model.inverse[0]),
                      matrix_to_json(model.inverse[1])};
    out["log_det"] = model.log_det;
    out["log_prior"] = model.log_prior;
    out["ridged"] = model.ridged;
    return out;
  }
  nlohmann::json operator()(const LogisticModel& model) const {
    nlohmann::json out;
    out["weights"] = model.weights;
    out["intercept"] = model.intercept;
    out["converged"] = model.converged;
    out["iterations"] = model.iterations;
    out["deviance"] = model.deviance;
    return out;
  }
  nlohmann::json operator()(const SvmModel& model) const {
    nlohmann::json out;
    out["support_vectors"] = matrix_to_json(model.support_vectors);
    out["coefficients"] = model.coefficients;
    out["bias"] = model.bias;
    out["gamma"] = model.gamma;
    out["cost"] = model.cost;
    out["variant"] = model.variant;
    out["iterations"] = model.iterations;
    return out;
  }
  nlohmann::json operator()(const KnnModel& model) const {
    nlohmann::json out;
    out["train"] = matrix_to_json(model.train);
    out["labels"] = model.labels;
    out["k"] = model.k;
    return out;
  }
};

}  // namespace

std::string classifier_to_json(const FittedClassifier& fitted) {
  nlohmann::json doc;
  doc["method"] = std::string(method_key(fitted.method));
  doc["display_name"] = std::string(method_display_name(fitted.method));
  doc["hyperparameters"] = fitted.hyperparameters;
  doc["standardization"] =
      fitted.standardization.columns.empty()
          ? nlohmann::json(nullptr)
          : standardization_to_json(fitted.standardization);
  doc["model"] = std::visit(ModelJsonBuilder{}, fitted.model);
  return doc.dump(2) + "\n";
}

}  // namespace studentrisk
