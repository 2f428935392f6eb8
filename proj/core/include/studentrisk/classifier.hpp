#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "studentrisk/dataset.hpp"
#include "studentrisk/discriminant.hpp"
#include "studentrisk/forest.hpp"
#include "studentrisk/knn.hpp"
#include "studentrisk/logistic.hpp"
#include "studentrisk/matrix.hpp"
#include "studentrisk/rng.hpp"
#include "studentrisk/svm.hpp"
#include "studentrisk/tree.hpp"

namespace studentrisk {

/// The nine benchmark configurations. Tree 1/2 are the two pruning
/// variants; SVM 1/2 the two kernel-bandwidth choices.
enum class Method {
  Tree1,
  Tree2,
  Lda,
  Qda,
  Forest,
  Logistic,
  Svm1,
  Svm2,
  Knn,
};

/// Report row order.
inline constexpr std::array<Method, 9> kBenchmarkOrder{
    Method::Tree1, Method::Tree2,    Method::Lda,
    Method::Qda,   Method::Forest,   Method::Logistic,
    Method::Svm1,  Method::Svm2,     Method::Knn,
};

/// Stable machine-readable key: "tree1", "lda", ...
std::string_view method_key(Method method);
/// Report label: "Decision Tree 1", "Random Forests", ...
std::string_view method_display_name(Method method);
std::optional<Method> method_from_key(std::string_view key);

struct MethodSpec {
  Method method = Method::Tree1;
  /// Growth minima for the two pruned-tree methods.
  TreeGrowthConfig tree_growth{};
  /// Internal folds for pruning-alpha, mtry, and k enumeration.
  int tuning_folds = 10;
  std::size_t forest_trees = 1000;
  MtryObjective forest_tuning = MtryObjective::CrossValidation;
  double svm_cost = 1.0;
};

/// One trained configuration with everything prediction needs: the model
/// itself plus the feature standardization fitted on the training data
/// (identity for the tree methods, which split on raw levels).
struct FittedClassifier {
  Method method = Method::Tree1;
  /// Empty columns when the method consumes raw levels.
  NormalizationParams standardization;
  std::variant<DecisionTree, RandomForest, LdaModel, QdaModel, LogisticModel,
               SvmModel, KnnModel>
      model;
  /// Short summary of the tuned values, e.g. "alpha=0.0031" or "k=7".
  std::string hyperparameters;

  /// Predicts a raw-level row (standardization is applied internally).
  /// Missing values are an error.
  int predict(std::span<const double> row) const;

  /// Success probability where the method defines one: the logistic
  /// sigmoid and the forest vote fraction. Empty otherwise.
  std::optional<double> success_probability(std::span<const double> row) const;
};

/// Trains one configuration on raw-level predictors. Methods that need
/// standardized features (LDA, QDA, logistic, SVM, kNN) are fitted on
/// z-scored columns and carry the transform; tree growth happens on the
/// raw levels. Stochastic steps draw from rng: pruning and k enumeration
/// consume it directly, the forest uses rng.child(1) for the mtry search
/// and rng.child(2) for the final fit.
FittedClassifier fit_classifier(const MethodSpec& spec, const Matrix& x,
                                const std::vector<int>& y, Rng& rng);

/// Tag + parameters, including the standardization.
std::string classifier_to_json(const FittedClassifier& fitted);

}  // namespace studentrisk
