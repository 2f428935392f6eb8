#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "studentrisk/classifier.hpp"
#include "studentrisk/discriminant.hpp"
#include "studentrisk/error.hpp"
#include "studentrisk/knn.hpp"
#include "studentrisk/logistic.hpp"
#include "studentrisk/rng.hpp"
#include "studentrisk/svm.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

using namespace studentrisk;
using testsupport::matrix_from;
using testsupport::normal_draw;

namespace {

std::pair<Matrix, std::vector<int>> gaussian_classes(Rng& rng, std::size_t n,
                                                     std::size_t p,
                                                     double separation,
                                                     double sd0 = 1.0,
                                                     double sd1 = 1.0) {
  Matrix x(n, p);
  std::vector<int> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    y[r] = r % 2 == 0 ? 0 : 1;
    const double center = y[r] == 1 ? separation : 0.0;
    const double sd = y[r] == 1 ? sd1 : sd0;
    for (std::size_t c = 0; c < p; ++c) {
      x.at(r, c) = center + sd * normal_draw(rng);
    }
  }
  return {x, y};
}

std::pair<Matrix, std::vector<int>> xor_corners(std::size_t copies) {
  const double corners[4][2] = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  const int labels[4] = {0, 0, 1, 1};
  Matrix x(4 * copies, 2);
  std::vector<int> y(4 * copies);
  for (std::size_t i = 0; i < 4 * copies; ++i) {
    x.at(i, 0) = corners[i % 4][0];
    x.at(i, 1) = corners[i % 4][1];
    y[i] = labels[i % 4];
  }
  return {x, y};
}

}  // namespace

// -------------------------------------------------------------- logistic

TEST_CASE("logistic deviance is monotone in the iteration budget") {
  Rng rng(80);
  for (int trial = 0; trial < 30; ++trial) {
    auto [x, y] = gaussian_classes(rng, 60, 3, 1.0);
    double previous = std::numeric_limits<double>::infinity();
    for (int budget = 1; budget <= 8; ++budget) {
      LogisticModel model = fit_logistic(x, y, budget);
      CHECK(model.deviance <= previous + 1e-9);
      previous = model.deviance;
    }
  }
}

TEST_CASE("intercept-only logistic recovers the base rate") {
  Matrix x(50, 0);
  std::vector<int> y(50, 0);
  for (std::size_t i = 0; i < 17; ++i) y[i] = 1;
  LogisticModel model = fit_logistic(x, y);
  CHECK(model.converged);
  const std::vector<double> empty;
  CHECK(model.probability(empty) == doctest::Approx(17.0 / 50.0).epsilon(1e-9));
}

TEST_CASE("complete separation runs out the iteration budget gracefully") {
  const std::size_t n = 100000;
  Matrix x(n, 1);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Classes split at zero with a unit margin between them.
    const bool positive = i % 2 == 0;
    const double offset = static_cast<double>(i % 500) / 500.0;
    x.at(i, 0) = positive ? 0.5 + offset : -0.5 - offset;
    y[i] = positive ? 1 : 0;
  }
  LogisticModel model = fit_logistic(x, y);
  CHECK_FALSE(model.converged);
  CHECK(model.iterations == 25);
  std::size_t errors = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (model.predict(x.row(i)) != y[i]) ++errors;
  }
  CHECK(errors == 0);
}

TEST_CASE("logistic separates a strong linear signal") {
  Rng rng(81);
  auto [x, y] = gaussian_classes(rng, 200, 2, 4.0);
  LogisticModel model = fit_logistic(x, y);
  std::size_t errors = 0;
  for (std::size_t r = 0; r < x.rows; ++r) {
    if (model.predict(x.row(r)) != y[r]) ++errors;
  }
  CHECK(errors <= 5);
  CHECK(model.weights[0] > 0.0);
}

TEST_CASE("logistic rejects bad labels and single-class data") {
  Matrix x = matrix_from({{1.0}, {2.0}});
  CHECK_THROWS_AS(fit_logistic(x, std::vector<int>{0, 2}), InputError);
  CHECK_THROWS_AS(fit_logistic(x, std::vector<int>{1, 1}), ModelError);
}

// ---------------------------------------------------------- discriminant

TEST_CASE("lda separates shifted gaussians and qda matches it there") {
  Rng rng(82);
  auto [x, y] = gaussian_classes(rng, 300, 2, 3.0);
  LdaModel lda = fit_lda(x, y);
  std::size_t errors = 0;
  for (std::size_t r = 0; r < x.rows; ++r) {
    if (lda.predict(x.row(r)) != y[r]) ++errors;
  }
  CHECK(static_cast<double>(errors) / static_cast<double>(x.rows) < 0.1);
  CHECK_FALSE(lda.ridged);
}

TEST_CASE("lda discriminant differences are affine invariant") {
  Rng rng(83);
  auto [x, y] = gaussian_classes(rng, 120, 2, 2.0);
  // x' = x A + b with an invertible A.
  const double a11 = 2.0, a12 = 0.7, a21 = -0.4, a22 = 1.3;
  Matrix transformed(x.rows, 2);
  for (std::size_t r = 0; r < x.rows; ++r) {
    transformed.at(r, 0) = x.at(r, 0) * a11 + x.at(r, 1) * a21 + 5.0;
    transformed.at(r, 1) = x.at(r, 0) * a12 + x.at(r, 1) * a22 - 3.0;
  }
  LdaModel base = fit_lda(x, y);
  LdaModel mapped = fit_lda(transformed, y);
  for (std::size_t r = 0; r < x.rows; ++r) {
    const auto d_base = base.discriminants(x.row(r));
    const auto d_mapped = mapped.discriminants(transformed.row(r));
    CHECK(std::abs((d_base[1] - d_base[0]) - (d_mapped[1] - d_mapped[0])) <
          1e-8);
    CHECK(base.predict(x.row(r)) == mapped.predict(transformed.row(r)));
  }
}

TEST_CASE("qda beats lda when only the covariances differ") {
  Rng rng(84);
  auto [x, y] = gaussian_classes(rng, 400, 2, 0.0, 0.15, 1.5);
  LdaModel lda = fit_lda(x, y);
  QdaModel qda = fit_qda(x, y);
  std::size_t lda_errors = 0;
  std::size_t qda_errors = 0;
  for (std::size_t r = 0; r < x.rows; ++r) {
    if (lda.predict(x.row(r)) != y[r]) ++lda_errors;
    if (qda.predict(x.row(r)) != y[r]) ++qda_errors;
  }
  const double n = static_cast<double>(x.rows);
  CHECK(static_cast<double>(qda_errors) / n <= 0.05);
  CHECK(static_cast<double>(lda_errors) / n >= 0.25);
}

TEST_CASE("degenerate covariance triggers the ridge instead of failing") {
  // Second column duplicates the first: singular pooled covariance.
  Rng rng(85);
  Matrix x(40, 2);
  std::vector<int> y(40);
  for (std::size_t r = 0; r < 40; ++r) {
    const double v = normal_draw(rng) + (r % 2 == 0 ? 0.0 : 2.0);
    x.at(r, 0) = v;
    x.at(r, 1) = v;
    y[r] = r % 2 == 0 ? 0 : 1;
  }
  LdaModel lda = fit_lda(x, y);
  CHECK(lda.ridged);
  QdaModel qda = fit_qda(x, y);
  CHECK((qda.ridged[0] || qda.ridged[1]));
}

TEST_CASE("discriminant fits require both classes") {
  Matrix x = matrix_from({{1.0, 2.0}, {2.0, 1.0}});
  CHECK_THROWS_AS(fit_lda(x, std::vector<int>{1, 1}), ModelError);
  CHECK_THROWS_AS(fit_qda(x, std::vector<int>{0, 0}), ModelError);
}

// -------------------------------------------------------------------- svm

TEST_CASE("svm dual solution is feasible on random problems") {
  Rng rng(86);
  for (int trial = 0; trial < 10; ++trial) {
    auto [x, y] = gaussian_classes(rng, 60, 2, 1.0 + rng.uniform_real());
    for (int variant : {1, 2}) {
      SvmModel model = fit_svm(x, y, variant);
      double balance = 0.0;
      for (double coefficient : model.coefficients) {
        balance += coefficient;
        CHECK(std::abs(coefficient) <= model.cost + 1e-12);
        CHECK(std::abs(coefficient) > 0.0);
      }
      CHECK(std::abs(balance) <= 1e-6);
      CHECK(model.variant == variant);
    }
  }
}

TEST_CASE("svm solves xor with zero resubstitution error") {
  auto [x, y] = xor_corners(10);
  SvmModel model = fit_svm(x, y, 1);
  for (std::size_t r = 0; r < x.rows; ++r) {
    CHECK(model.predict(x.row(r)) == y[r]);
  }
}

TEST_CASE("median heuristic gamma on a frozen example") {
  // Points 0, 1, 3: pairwise distances {1, 2, 3}, lower median 2.
  Matrix x = matrix_from({{0.0}, {1.0}, {3.0}});
  CHECK(median_heuristic_gamma(x) == doctest::Approx(1.0 / 8.0));
}

TEST_CASE("variant 2 uses gamma 1/p") {
  Rng rng(87);
  auto [x, y] = gaussian_classes(rng, 40, 3, 2.0);
  SvmModel model = fit_svm(x, y, 2);
  CHECK(model.gamma == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("svm fit is deterministic") {
  Rng rng(88);
  auto [x, y] = gaussian_classes(rng, 50, 2, 1.5);
  SvmModel a = fit_svm(x, y, 1);
  SvmModel b = fit_svm(x, y, 1);
  CHECK(a == b);
}

TEST_CASE("svm separates shifted gaussians") {
  Rng rng(89);
  auto [x, y] = gaussian_classes(rng, 120, 2, 3.5);
  SvmModel model = fit_svm(x, y, 1);
  std::size_t errors = 0;
  for (std::size_t r = 0; r < x.rows; ++r) {
    if (model.predict(x.row(r)) != y[r]) ++errors;
  }
  CHECK(static_cast<double>(errors) / static_cast<double>(x.rows) < 0.08);
}

// -------------------------------------------------------------------- knn

TEST_CASE("knn votes among the nearest rows") {
  Matrix x = matrix_from({{0.0}, {1.0}, {2.0}, {10.0}});
  std::vector<int> y{0, 0, 1, 1};
  KnnModel model = fit_knn(x, y, 3);
  // Neighbors of 1.5: rows 1 (d 0.5), 2 (d 0.5), 0 (d 1.5) -> votes 0,1,0.
  CHECK(knn_predict(model, std::vector<double>{1.5}) == 0);
  // Neighbors of 9: rows 3, 2, 1 -> votes 1,1,0.
  CHECK(knn_predict(model, std::vector<double>{9.0}) == 1);
}

TEST_CASE("knn distance ties take the lower row first") {
  Matrix x = matrix_from({{1.0}, {-1.0}, {3.0}});
  std::vector<int> y{1, 0, 0};
  KnnModel model = fit_knn(x, y, 1);
  // Query 0 is equidistant from rows 0 and 1; row 0 wins.
  CHECK(knn_predict(model, std::vector<double>{0.0}) == 1);
}

TEST_CASE("knn vote ties go to class 0") {
  Matrix x = matrix_from({{0.0}, {1.0}});
  std::vector<int> y{0, 1};
  KnnModel model = fit_knn(x, y, 2);
  CHECK(knn_predict(model, std::vector<double>{0.5}) == 0);
}

TEST_CASE("optimize_k enumerates odd candidates and is deterministic") {
  Rng rng(90);
  auto [x, y] = gaussian_classes(rng, 60, 2, 2.0);
  Rng t1(5);
  KnnTuning a = optimize_k(x, y, 5, t1);
  Rng t2(5);
  KnnTuning b = optimize_k(x, y, 5, t2);
  CHECK(a.k == b.k);
  CHECK(a.errors == b.errors);
  REQUIRE(!a.candidates.empty());
  for (std::size_t candidate : a.candidates) {
    CHECK(candidate % 2 == 1);
    CHECK(candidate <= 31);
  }
  CHECK(a.k % 2 == 1);
  const double best = *std::min_element(a.errors.begin(), a.errors.end());
  for (std::size_t i = 0; i < a.candidates.size(); ++i) {
    if (a.candidates[i] == a.k) {
      CHECK(a.errors[i] == doctest::Approx(best));
      break;
    }
  }
}

TEST_CASE("knn input validation") {
  Matrix x = matrix_from({{1.0}, {2.0}});
  std::vector<int> y{0, 1};
  CHECK_THROWS_AS(fit_knn(x, y, 0), InputError);
  CHECK_THROWS_AS(fit_knn(x, y, 3), InputError);
}

// ---------------------------------------------------------- fit_classifier

TEST_CASE("fit_classifier trains every method end to end") {
  Rng data_rng(91);
  Matrix x(80, 3);
  std::vector<int> y(80);
  for (std::size_t r = 0; r < 80; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      x.at(r, c) = static_cast<double>(data_rng.uniform_int(1, 4));
    }
    y[r] = x.at(r, 0) >= 3.0 ? 1 : 0;
  }
  for (Method method : kBenchmarkOrder) {
    MethodSpec spec;
    spec.method = method;
    spec.forest_trees = 15;
    spec.tuning_folds = 5;
    Rng rng(7);
    FittedClassifier fitted = fit_classifier(spec, x, y, rng);
    CHECK(fitted.method == method);
    CHECK_FALSE(fitted.hyperparameters.empty());
    std::size_t errors = 0;
    for (std::size_t r = 0; r < x.rows; ++r) {
      const int predicted = fitted.predict(x.row(r));
      CHECK((predicted == 0 || predicted == 1));
      if (predicted != y[r]) ++errors;
    }
    // The signal is a clean threshold on x1; nothing should do badly.
    CHECK(static_cast<double>(errors) / static_cast<double>(x.rows) < 0.35);
    const auto probability = fitted.success_probability(x.row(0));
    if (method == Method::Logistic || method == Method::Forest) {
      REQUIRE(probability.has_value());
      CHECK(*probability >= 0.0);
      CHECK(*probability <= 1.0);
    } else {
      CHECK_FALSE(probability.has_value());
    }
  }
}

TEST_CASE("fit_classifier standardizes for the metric methods only") {
  Rng data_rng(92);
  Matrix x(40, 2);
  std::vector<int> y(40);
  for (std::size_t r = 0; r < 40; ++r) {
    x.at(r, 0) = static_cast<double>(data_rng.uniform_int(1, 4));
    x.at(r, 1) = static_cast<double>(data_rng.uniform_int(1, 2));
    y[r] = r % 2;
  }
  MethodSpec tree_spec;
  tree_spec.method = Method::Tree1;
  Rng rng(3);
  FittedClassifier tree = fit_classifier(tree_spec, x, y, rng);
  CHECK(tree.standardization.columns.empty());
  MethodSpec knn_spec;
  knn_spec.method = Method::Knn;
  knn_spec.tuning_folds = 5;
  Rng rng2(3);
  FittedClassifier knn = fit_classifier(knn_spec, x, y, rng2);
  CHECK(knn.standardization.columns.size() == 2);
}

TEST_CASE("tree variants choose their pruning rule") {
  Rng data_rng(93);
  Matrix x(120, 3);
  std::vector<int> y(120);
  for (std::size_t r = 0; r < 120; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      x.at(r, c) = static_cast<double>(data_rng.uniform_int(1, 4));
    }
    y[r] = (x.at(r, 0) >= 3.0) == (data_rng.uniform_real() < 0.85) ? 1 : 0;
  }
  MethodSpec spec1;
  spec1.method = Method::Tree1;
  MethodSpec spec2;
  spec2.method = Method::Tree2;
  Rng rng1(11);
  Rng rng2(11);
  FittedClassifier tree1 = fit_classifier(spec1, x, y, rng1);
  FittedClassifier tree2 = fit_classifier(spec2, x, y, rng2);
  const auto& model1 = std::get<DecisionTree>(tree1.model);
  const auto& model2 = std::get<DecisionTree>(tree2.model);
  // The one-SE variant never keeps a bigger tree than the CV minimum.
  CHECK(model2.leaf_count() <= model1.leaf_count());
}

TEST_CASE("classifier JSON tags the method") {
  Rng data_rng(94);
  Matrix x(30, 2);
  std::vector<int> y(30);
  for (std::size_t r = 0; r < 30; ++r) {
    x.at(r, 0) = static_cast<double>(data_rng.uniform_int(1, 4));
    x.at(r, 1) = static_cast<double>(data_rng.uniform_int(1, 4));
    y[r] = r % 2;
  }
  MethodSpec spec;
  spec.method = Method::Lda;
  Rng rng(1);
  FittedClassifier fitted = fit_classifier(spec, x, y, rng);
  const std::string json = classifier_to_json(fitted);
  CHECK(json.find("\"lda\"") != std::string::npos);
}

TEST_CASE("method keys round-trip") {
  for (Method method : kBenchmarkOrder) {
    auto parsed = method_from_key(method_key(method));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == method);
    CHECK_FALSE(method_display_name(method).empty());
  }
  CHECK_FALSE(method_from_key("bogus").has_value());
}
