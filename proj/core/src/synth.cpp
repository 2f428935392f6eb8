#include "studentrisk/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "studentrisk/error.hpp"

namespace studentrisk {

namespace {

void validate_spec(const CohortSpec& spec) {
  if (spec.n == 0) throw InputError("cohort size must be at least 1");
  if (spec.exact_pass_count) {
    if (*spec.exact_pass_count > spec.n) {
      throw InputError("exact pass count " + std::to_string(*spec.exact_pass_count) +
                       " exceeds cohort size " + std::to_string(spec.n));
    }
  } else if (!(spec.success_rate > 0.0 && spec.success_rate < 1.0)) {
    throw InputError("success rate must lie strictly between 0 and 1");
  }
  if (!(spec.missing_rate >= 0.0 && spec.missing_rate < 1.0)) {
    throw InputError("missing rate must lie in [0,1)");
  }
  for (const auto& v : spec.variables) {
    if (v.name.empty()) throw InputError("cohort variable with empty name");
    if (v.levels.size() < 2) {
      throw InputError("variable " + v.name + " needs at least 2 levels");
    }
    if (v.marginal.size() != v.levels.size()) {
      throw InputError("variable " + v.name +
                       " has " + std::to_string(v.levels.size()) + " levels but " +
                       std::to_string(v.marginal.size()) + " marginal entries");
    }
    for (std::size_t i = 1; i < v.levels.size(); ++i) {
      if (v.levels[i] <= v.levels[i - 1]) {
        throw InputError("variable " + v.name + " levels must strictly increase");
      }
    }
    double sum = 0.0;
    for (double p : v.marginal) {
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw InputError("variable " + v.name + " has a negative marginal entry");
      }
      sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
      throw InputError("variable " + v.name + " marginal sums to " +
                       std::to_string(sum) + ", expected 1");
    }
    if (!std::isfinite(v.effect)) {
      throw InputError("variable " + v.name + " has a non-finite effect");
    }
  }
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

/// Intercept b with mean(sigmoid(b + z_r)) within 1e-6 of target,
/// saturating at the bracket ends when the target is unreachable.
double solve_intercept(const std::vector<double>& z, double target) {
  auto mean_rate = [&](double b) {
    double s = 0.0;
    for (double zi : z) s += sigmoid(b + zi);
    return s / static_cast<double>(z.size());
  };
  double lo = -50.0;
  double hi = 50.0;
  if (mean_rate(lo) >= target) return lo;
  if (mean_rate(hi) <= target) return hi;
  double mid = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (lo + hi);
    double gap = mean_rate(mid) - target;
    if (std::fabs(gap) <= 1e-6) break;
    if (gap < 0.0) lo = mid;
    else hi = mid;
  }
  return mid;
}

nlohmann::json variable_to_json(const CohortVariable& v) {
  nlohmann::json doc;
  doc["name"] = v.name;
  doc["levels"] = v.levels;
  doc["marginal"] = v.marginal;
  doc["effect"] = v.effect;
  return doc;
}

nlohmann::json spec_to_json(const CohortSpec& spec) {
  nlohmann::json doc;
  doc["name"] = spec.name;
  doc["n"] = spec.n;
  doc["success_rate"] = spec.success_rate;
  if (spec.exact_pass_count) doc["exact_pass_count"] = *spec.exact_pass_count;
  else doc["exact_pass_count"] = nullptr;
  nlohmann::json vars = nlohmann::json::array();
  for (const auto& v : spec.variables) vars.push_back(variable_to_json(v));
  doc["variables"] = std::move(vars);
  doc["missing_rate"] = spec.missing_rate;
  doc["seed"] = spec.seed;
  return doc;
}

CohortSpec spec_from_json_value(const nlohmann::json& doc) {
  CohortSpec spec;
  try {
    spec.name = doc.at("name").get<std::string>();
    spec.n = doc.at("n").get<std::size_t>();
    spec.success_rate = doc.at("success_rate").get<double>();
    if (doc.contains("exact_pass_count") && !doc.at("exact_pass_count").is_null()) {
      spec.exact_pass_count = doc.at("exact_pass_count").get<std::size_t>();
    }
    for (const auto& item : doc.at("variables")) {
      CohortVariable v;
      v.name = item.at("name").get<std::string>();
      v.levels = item.at("levels").get<std::vector<int>>();
      v.marginal = item.at("marginal").get<std::vector<double>>();
      v.effect = item.value("effect", 0.0);
      spec.variables.push_back(std::move(v));
    }
    spec.missing_rate = doc.value("missing_rate", 0.0);
    spec.seed = doc.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed cohort spec: ") + e.what());
  }
  validate_spec(spec);
  return spec;
}

nlohmann::json parse_json(const std::string& text, const char* what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

CohortVariable binary_variable(std::string name, double yes_percent) {
  CohortVariable v;
  v.name = std::move(name);
  v.levels = {1, 2};
  v.marginal = {1.0 - yes_percent / 100.0, yes_percent / 100.0};
  return v;
}

/// Four-level variable whose marginal pools two subcohorts of sizes n1
/// and n2 with per-option percentages p1 and p2.
CohortVariable pooled_variable(std::string name, double n1, const double (&p1)[4],
                               double n2, const double (&p2)[4]) {
  CohortVariable v;
  v.name = std::move(name);
  v.levels = {1, 2, 3, 4};
  // Published percentage rows can sum to 99 or 101 after rounding, so
  // normalize by the actual pooled mass rather than assuming 100.
  double total = 0.0;
  for (int i = 0; i < 4; ++i) total += n1 * p1[i] + n2 * p2[i];
  for (int i = 0; i < 4; ++i) {
    v.marginal.push_back((n1 * p1[i] + n2 * p2[i]) / total);
  }
  return v;
}

CohortSpec standard_preset(std::string name, std::size_t n, std::size_t pass,
                           double male, double parents, double will_pass,
                           double never_smokes) {
  CohortSpec spec;
  spec.name = std::move(name);
  spec.n = n;
  spec.exact_pass_count = pass;
  spec.success_rate = static_cast<double>(pass) / static_cast<double>(n);
  spec.variables.push_back(binary_variable("male", male));
  spec.variables.push_back(binary_variable("lives_with_parents", parents));
  spec.variables.push_back(binary_variable("thinks_will_pass", will_pass));
  spec.variables.push_back(binary_variable("never_smokes", never_smokes));
  return spec;
}

}  // namespace

std::string CohortSpec::to_json_string() const { return spec_to_json(*this).dump(2); }

CohortSpec CohortSpec::from_json(const std::string& text) {
  return spec_from_json_value(parse_json(text, "cohort spec"));
}

std::string GenerationManifest::to_json_string() const {
  nlohmann::json doc;
  doc["spec"] = spec_to_json(spec);
  doc["seed"] = seed;
  doc["realized_pass_count"] = realized_pass_count;
  doc["realized_level_counts"] = realized_level_counts;
  return doc.dump(2);
}

GenerationManifest GenerationManifest::from_json(const std::string& text) {
  nlohmann::json doc = parse_json(text, "generation manifest");
  GenerationManifest manifest;
  try {
    manifest.spec = spec_from_json_value(doc.at("spec"));
    manifest.seed = doc.at("seed").get<std::uint64_t>();
    manifest.realized_pass_count = doc.at("realized_pass_count").get<std::size_t>();
    manifest.realized_level_counts =
        doc.at("realized_level_counts").get<std::vector<std::vector<std::size_t>>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed generation manifest: ") + e.what());
  }
  return manifest;
}

Schema cohort_schema(const CohortSpec& spec) {
  validate_spec(spec);
  Schema schema;
  for (const auto& v : spec.variables) {
    VariableSpec var;
    var.name = v.name;
    var.kind = v.levels.size() == 2 ? VarKind::Binary : VarKind::OrdinalDiscrete;
    var.levels = v.levels;
    var.role = VarRole::Predictor;
    var.missing_allowed = true;
    schema.variables.push_back(std::move(var));
  }
  VariableSpec outcome;
  outcome.name = "success";
  outcome.kind = VarKind::Binary;
  outcome.levels = {0, 1};
  outcome.role = VarRole::Outcome;
  outcome.missing_allowed = false;
  schema.variables.push_back(std::move(outcome));
  schema.validate();
  return schema;
}

std::pair<Dataset, GenerationManifest> generate_cohort(const CohortSpec& spec,
                                                       const Rng& rng) {
  Schema schema = cohort_schema(spec);
  Dataset data(schema, spec.n);
  const std::size_t n = spec.n;
  const std::size_t p = spec.variables.size();

  std::vector<std::vector<double>> standardized(p);
  for (std::size_t v = 0; v < p; ++v) {
    const auto& var = spec.variables[v];
    double mu = 0.0;
    for (std::size_t i = 0; i < var.levels.size(); ++i) {
      mu += var.marginal[i] * var.levels[i];
    }
    double variance = 0.0;
    for (std::size_t i = 0; i < var.levels.size(); ++i) {
      double d = var.levels[i] - mu;
      variance += var.marginal[i] * d * d;
    }
    double sd = std::sqrt(variance);
    for (std::size_t i = 0; i < var.levels.size(); ++i) {
      standardized[v].push_back(sd > 0.0 ? (var.levels[i] - mu) / sd : 0.0);
    }
  }

  GenerationManifest manifest;
  manifest.spec = spec;
  manifest.seed = rng.seed();
  for (std::size_t v = 0; v < p; ++v) {
    manifest.realized_level_counts.emplace_back(spec.variables[v].levels.size(), 0);
  }

  Rng level_rng = rng.child(1);
  std::vector<double> score(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t v = 0; v < p; ++v) {
      const auto& var = spec.variables[v];
      double u = level_rng.uniform_real();
      double cumulative = 0.0;
      std::size_t pick = var.levels.size() - 1;
      for (std::size_t i = 0; i < var.levels.size(); ++i) {
        cumulative += var.marginal[i];
        if (u < cumulative) {
          pick = i;
          break;
        }
      }
      ++manifest.realized_level_counts[v][pick];
      score[r] += var.effect * standardized[v][pick];
      data.set_cell(r, v, static_cast<double>(var.levels[pick]));
    }
  }

  double target = spec.exact_pass_count
                      ? static_cast<double>(*spec.exact_pass_count) / static_cast<double>(n)
                      : spec.success_rate;
  double intercept = solve_intercept(score, target);
  std::vector<double> prob(n);
  for (std::size_t r = 0; r < n; ++r) prob[r] = sigmoid(intercept + score[r]);

  std::vector<int> y(n, 0);
  if (spec.exact_pass_count) {
    Rng jitter_rng = rng.child(3);
    std::vector<double> jitter(n);
    for (std::size_t r = 0; r < n; ++r) jitter[r] = jitter_rng.uniform_real();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (prob[a] != prob[b]) return prob[a] > prob[b];
      if (jitter[a] != jitter[b]) return jitter[a] > jitter[b];
      return a < b;
    });
    for (std::size_t k = 0; k < *spec.exact_pass_count; ++k) y[order[k]] = 1;
  } else {
    Rng outcome_rng = rng.child(2);
    for (std::size_t r = 0; r < n; ++r) {
      y[r] = outcome_rng.uniform_real() < prob[r] ? 1 : 0;
    }
  }

  for (std::size_t r = 0; r < n; ++r) {
    data.set_cell(r, p, static_cast<double>(y[r]));
    manifest.realized_pass_count += static_cast<std::size_t>(y[r]);
  }

  if (spec.missing_rate > 0.0) {
    Rng missing_rng = rng.child(4);
    data = inject_missing(data, spec.missing_rate, missing_rng);
  }
  return {std::move(data), std::move(manifest)};
}

std::pair<Dataset, GenerationManifest> generate_cohort(const CohortSpec& spec) {
  return generate_cohort(spec, Rng(spec.seed));
}

Dataset replay(const GenerationManifest& manifest) {
  return generate_cohort(manifest.spec, Rng(manifest.seed)).first;
}

Dataset inject_missing(const Dataset& data, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw InputError("missing rate must lie in [0,1)");
  Dataset out = data;
  if (rate == 0.0) return out;
  auto predictors = data.schema().predictor_indices();
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    for (std::size_t c : predictors) {
      if (rng.uniform_real() < rate) out.set_cell(r, c, std::nullopt);
    }
  }
  return out;
}

CohortSpec preset_cohort(const std::string& name) {
  if (name == "t1-france") return standard_preset(name, 614, 436, 57, 45, 86, 69);
  if (name == "t1-belgium") return standard_preset(name, 169, 66, 57, 75, 93, 81);
  if (name == "t1-mixed") return standard_preset(name, 783, 502, 57, 52, 87, 71);
  if (name == "t2-mixed") {
    CohortSpec spec = standard_preset(name, 214, 89, 68, 71, 92, 76);
    const double fr = 52.0;
    const double be = 162.0;
    spec.variables.push_back(pooled_variable(
        "leaves_after_break", fr, {73, 21, 6, 0}, be, {57, 39, 3, 1}));
    spec.variables.push_back(pooled_variable(
        "arrives_late", fr, {36, 52, 8, 4}, be, {49, 45, 4, 2}));
    spec.variables.push_back(pooled_variable(
        "takes_notes", fr, {2, 8, 42, 48}, be, {0, 6, 42, 52}));
    spec.variables.push_back(pooled_variable(
        "sits_same_area", fr, {4, 6, 48, 42}, be, {1, 12, 57, 30}));
    spec.variables.push_back(pooled_variable(
        "sits_same_people", fr, {4, 13, 35, 48}, be, {1, 4, 51, 44}));
    spec.variables.push_back(pooled_variable(
        "bothered_by_neighbors", fr, {33, 46, 13, 8}, be, {18, 59, 18, 5}));
    spec.variables.push_back(pooled_variable(
        "talks_with_neighbors", fr, {13, 39, 38, 10}, be, {2, 58, 33, 7}));
    spec.variables.push_back(pooled_variable(
        "easily_distracted", fr, {4, 44, 37, 15}, be, {7, 46, 36, 11}));
    spec.variables.push_back(pooled_variable(
        "asks_lecturer", fr, {40, 48, 2, 10}, be, {40, 52, 7, 1}));
    spec.variables.push_back(pooled_variable(
        "asks_neighbors", fr, {10, 19, 58, 13}, be, {2, 25, 59, 14}));
    spec.variables.push_back(pooled_variable(
        "attentive_full_lesson", fr, {6, 31, 48, 15}, be, {5, 23, 62, 10}));
    spec.variables.push_back(pooled_variable(
        "laptop_notes", fr, {84, 8, 2, 6}, be, {93, 5, 2, 0}));
    spec.variables.push_back(pooled_variable(
        "laptop_games", fr, {84, 8, 6, 2}, be, {92, 4, 3, 1}));
    spec.variables.push_back(pooled_variable(
        "texts_during_class", fr, {31, 29, 27, 13}, be, {16, 48, 28, 9}));
    return spec;
  }
  throw InputError("unknown cohort preset '" + name +
                   "'; known presets: t1-france, t1-belgium, t1-mixed, t2-mixed");
}

std::vector<std::string> preset_cohort_names() {
  return {"t1-france", "t1-belgium", "t1-mixed", "t2-mixed"};
}

}  // namespace studentrisk
