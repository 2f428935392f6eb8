#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "studentrisk/dataset.hpp"
#include "studentrisk/rng.hpp"

namespace studentrisk {

/// One synthetic predictor: a discrete marginal over its level codes and
/// a log-odds effect on the outcome per standardized level unit.
struct CohortVariable {
  std::string name;
  std::vector<int> levels;
  /// One probability per level; must sum to 1.
  std::vector<double> marginal;
  double effect = 0.0;

  bool operator==(const CohortVariable&) const = default;
};

/// Recipe for a synthetic student cohort.
struct CohortSpec {
  std::string name;
  std::size_t n = 0;
  /// Target outcome mean, strictly between 0 and 1. Ignored when
  /// exact_pass_count is set.
  double success_rate = 0.5;
  /// When set, exactly this many rows get outcome 1.
  std::optional<std::size_t> exact_pass_count;
  std::vector<CohortVariable> variables;
  /// Probability that each predictor cell is blanked after generation.
  double missing_rate = 0.0;
  /// Default generator seed used by the one-argument generate_cohort.
  std::uint64_t seed = 0;

  static CohortSpec from_json(const std::string& text);
  std::string to_json_string() const;

  bool operator==(const CohortSpec&) const = default;
};

/// Record of one generation run: the spec plus the seed that drove it,
/// which together regenerate the dataset bit-exactly, and realized
/// tallies for quick sanity checks.
struct GenerationManifest {
  CohortSpec spec;
  std::uint64_t seed = 0;
  std::size_t realized_pass_count = 0;
  /// Per variable, how often each declared level was generated (counted
  /// before any cells are blanked).
  std::vector<std::vector<std::size_t>> realized_level_counts;

  static GenerationManifest from_json(const std::string& text);
  std::string to_json_string() const;
};

/// Schema of generated cohorts: the predictors in spec order (binary
/// kind when a variable has two levels, ordinal otherwise, missing
/// allowed), then a "success" outcome with levels {0,1}.
Schema cohort_schema(const CohortSpec& spec);

/// Draws a cohort from a latent-logistic model. Each predictor is drawn
/// from its marginal; the linear score of a row is the sum of
/// effect * standardized level over variables, where levels are
/// standardized by their marginal mean and standard deviation. An
/// intercept is solved by bisection so the mean success probability hits
/// the target rate within 1e-6. Outcomes are then Bernoulli draws, or,
/// in exact-count mode, the rows with the highest (probability, jitter)
/// pairs. Level draws come from rng.child(1), Bernoulli draws from
/// child(2), jitter from child(3), and blanking from child(4); the
/// passed rng itself is never advanced, so any rng constructed with the
/// same seed replays the cohort.
std::pair<Dataset, GenerationManifest> generate_cohort(const CohortSpec& spec,
                                                       const Rng& rng);

/// Convenience overload seeding the generator with spec.seed.
std::pair<Dataset, GenerationManifest> generate_cohort(const CohortSpec& spec);

/// Regenerates exactly the dataset a manifest records.
Dataset replay(const GenerationManifest& manifest);

/// Blanks each predictor cell independently with the given probability;
/// outcome cells are exempt. rate must be in [0,1).
Dataset inject_missing(const Dataset& data, double rate, Rng& rng);

/// Built-in cohort recipes matching the marginal statistics of two real
/// first-year university populations: "t1-france" (n=614, 436 passing),
/// "t1-belgium" (169/66) and "t1-mixed" (783/502) with four binary
/// variables each, and "t2-mixed" (214/89) adding fourteen four-level
/// class-behavior variables. All effects are zero; the presets reproduce
/// marginals, not dependence structure.
CohortSpec preset_cohort(const std::string& name);

/// Names accepted by preset_cohort.
std::vector<std::string> preset_cohort_names();

}  // namespace studentrisk
