#include <benchmark/benchmark.h>

#include "sqsd/belief.hpp"
#include "sqsd/counters.hpp"
#include "sqsd/rng.hpp"

namespace {

void BM_ProjectBinary(benchmark::State& state) {
  const auto grid = sqsd::build_grid(static_cast<int>(state.range(0)), 2);
  auto rng = sqsd::CounterRng::substream(11, 0);
  std::vector<std::vector<double>> targets;
  for (int k = 0; k < 256; ++k) targets.push_back(sqsd::sample_simplex(2, rng));
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sqsd::project(targets[k++ & 255], grid));
  }
  state.counters["points"] = static_cast<double>(grid.size());
  state.SetComplexityN(static_cast<int64_t>(grid.size()));
}
BENCHMARK(BM_ProjectBinary)->RangeMultiplier(4)->Range(50, 3200)->Complexity(benchmark::oN);

void BM_ProjectTrine(benchmark::State& state) {
  const auto grid = sqsd::build_grid(static_cast<int>(state.range(0)), 3);
  auto rng = sqsd::CounterRng::substream(12, 0);
  std::vector<std::vector<double>> targets;
  for (int k = 0; k < 256; ++k) targets.push_back(sqsd::sample_simplex(3, rng));
  std::size_t k = 0;
  sqsd::CostCounters counters;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sqsd::project(targets[k++ & 255], grid, &counters));
  }
  state.counters["points"] = static_cast<double>(grid.size());
}
BENCHMARK(BM_ProjectTrine)->Arg(15)->Arg(30)->Arg(60)->Arg(120);

}  // namespace
