#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "red/deadlines.hpp"
#include "red/refinement.hpp"
#include "red/scenarios.hpp"
#include "red/simulator.hpp"

using namespace red;

namespace {

DagSpec layered(std::size_t layers, std::size_t width) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> cost(1, 1000);
  DagSpec d;
  d.id = "bench";
  auto name = [](std::size_t l, std::size_t k) { return "v" + std::to_string(l) + "_" + std::to_string(k); };
  for (std::size_t l = 0; l < layers; ++l) {
    for (std::size_t k = 0; k < width; ++k) {
      NodeAttrs a;
      a.wcet = Duration{cost(rng)};
      d.nodes.emplace(name(l, k), a);
      if (l > 0) {
        d.edges.insert({name(l - 1, k), name(l, k)});
        d.edges.insert({name(l - 1, (k + 1) % width), name(l, k)});
      }
    }
  }
  d.deadline = from_seconds(1);
  return d;
}

void BM_ProportionalAssign(benchmark::State& state) {
  const DagSpec d = layered(static_cast<std::size_t>(state.range(0)), 8);
  const CostMap costs = wcet_costs(d);
  for (auto _ : state) benchmark::DoNotOptimize(proportional_assign(d, d.deadline, costs, TimePoint{}));
  state.SetComplexityN(static_cast<std::int64_t>(d.nodes.size() + d.edges.size()));
}
BENCHMARK(BM_ProportionalAssign)->RangeMultiplier(2)->Range(64, 2048)->Complexity(benchmark::oN);

void BM_CriticalPath(benchmark::State& state) {
  const DagSpec d = layered(static_cast<std::size_t>(state.range(0)), 8);
  for (auto _ : state) benchmark::DoNotOptimize(critical_path_cost(d));
  state.SetComplexityN(static_cast<std::int64_t>(d.nodes.size() + d.edges.size()));
}
BENCHMARK(BM_CriticalPath)->RangeMultiplier(2)->Range(64, 2048)->Complexity(benchmark::oN);

void BM_DynamicMerge(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> enc(0, 3), rel(0, 1000);
  std::vector<FrontierItem> f;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    f.push_back({"u" + std::to_string(i), "E" + std::to_string(enc(rng)), 0, from_ms(rel(rng)), from_ms(rel(rng))});
  }
  for (auto _ : state) benchmark::DoNotOptimize(dynamic_merge(f, from_ms(100)));
}
BENCHMARK(BM_DynamicMerge)->Range(8, 1024);

void BM_Simulate(benchmark::State& state, const char* scenario, Variant v) {
  const Workload w = generate_scenario(scenario);
  for (auto _ : state) benchmark::DoNotOptimize(run(w, v, 0));
}
BENCHMARK_CAPTURE(BM_Simulate, urban_edf, "urban", Variant::EDF);
BENCHMARK_CAPTURE(BM_Simulate, urban_red, "urban", Variant::RED);
BENCHMARK_CAPTURE(BM_Simulate, burst_red, "burst(100)", Variant::RED);

}  // namespace

BENCHMARK_MAIN();
