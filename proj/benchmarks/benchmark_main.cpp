#include <benchmark/benchmark.h>

#include <utility>
#include <vector>

#include "studentrisk/association.hpp"
#include "studentrisk/dataset.hpp"
#include "studentrisk/forest.hpp"
#include "studentrisk/imputation.hpp"
#include "studentrisk/rng.hpp"
#include "studentrisk/synth.hpp"
#include "studentrisk/tree.hpp"

using namespace studentrisk;

namespace {

std::pair<Matrix, std::vector<int>> level_data(std::size_t n, std::size_t p,
                                               std::uint64_t seed) {
  Rng rng(seed);
  Matrix x(n, p);
  std::vector<int> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < p; ++c) {
      x.at(r, c) = static_cast<double>(rng.uniform_int(1, 4));
    }
    y[r] = x.at(r, 0) >= 3.0 ? 1 : 0;
    if (rng.uniform_real() < 0.2) y[r] = 1 - y[r];
  }
  return {x, y};
}

CohortSpec benchmark_cohort(std::size_t n, std::size_t p, double missing_rate) {
  CohortSpec spec;
  spec.name = "bench";
  spec.n = n;
  spec.success_rate = 0.55;
  spec.missing_rate = missing_rate;
  for (std::size_t v = 0; v < p; ++v) {
    CohortVariable variable;
    variable.name = "v" + std::to_string(v + 1);
    variable.levels = {1, 2, 3, 4};
    variable.marginal = {0.25, 0.25, 0.25, 0.25};
    variable.effect = v < 3 ? 1.0 : 0.0;
    spec.variables.push_back(variable);
  }
  return spec;
}

void bm_grow_tree(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto [x, y] = level_data(n, 10, 1);
  TreeGrowthConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(grow_tree(x, y, config));
  }
}
BENCHMARK(bm_grow_tree)->Arg(200)->Arg(800);

void bm_pruning_path(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto [x, y] = level_data(n, 10, 2);
  DecisionTree tree = grow_tree(x, y, TreeGrowthConfig{2, 1});
  for (auto _ : state) {
    benchmark::DoNotOptimize(pruning_path(tree, x, y));
  }
}
BENCHMARK(bm_pruning_path)->Arg(200)->Arg(800);

void bm_fit_forest(benchmark::State& state) {
  const auto trees = static_cast<std::size_t>(state.range(0));
  auto [x, y] = level_data(400, 10, 3);
  for (auto _ : state) {
    Rng rng(7);
    benchmark::DoNotOptimize(fit_forest(x, y, trees, 3, rng));
  }
}
BENCHMARK(bm_fit_forest)->Arg(50)->Arg(200);

void bm_impute_missing(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto [data, manifest] = generate_cohort(benchmark_cohort(n, 20, 0.1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(impute_missing(data));
  }
}
BENCHMARK(bm_impute_missing)->Arg(200)->Arg(800);

void bm_variable_screen(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto [data, manifest] = generate_cohort(benchmark_cohort(n, 20, 0.0));
  SelectionConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_variables(data, config));
  }
}
BENCHMARK(bm_variable_screen)->Arg(500)->Arg(2000);

void bm_generate_cohort(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const CohortSpec spec = benchmark_cohort(n, 20, 0.05);
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_cohort(spec));
  }
}
BENCHMARK(bm_generate_cohort)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
