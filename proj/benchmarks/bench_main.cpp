#include <benchmark/benchmark.h>

#include "blockscene/ga_solver.hpp"
#include "blockscene/metrics.hpp"
#include "support/scenes.hpp"
#include "support/synthetic.hpp"

using namespace blockscene;
namespace bt = blockscene::testing;

static void BM_TotalError(benchmark::State& state) {
  Rng rng(1);
  const auto p = bt::make_feasible_problem(rng, 5);
  const AABB mov = object_bounds(p.movable);
  for (auto _ : state) {
    benchmark::DoNotOptimize(total_error(p.constraints, p.references, mov).total_error);
  }
}
BENCHMARK(BM_TotalError);

static void BM_Solve(benchmark::State& state) {
  Rng rng(2);
  const auto p = bt::make_feasible_problem(rng, 5);
  GAConfig cfg;
  cfg.population_size = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve(p.constraints, p.references, p.movable, cfg).final_error);
  }
}
BENCHMARK(BM_Solve)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_Metrics(benchmark::State& state) {
  Rng rng(3);
  SceneGraphStore store;
  for (int i = 0; i < state.range(0); ++i) {
    const std::string id = "o" + std::to_string(i);
    store.add_object(bt::make_node(bt::cube_object(id, {rng.uniform(0, 20), rng.uniform(0, 20), rng.uniform(0, 5)})));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_metrics(store).isolation_score);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Metrics)->RangeMultiplier(4)->Range(16, 1024)->Complexity();
BENCHMARK_MAIN();
