#include <benchmark/benchmark.h>

#include "sqsd/case_studies.hpp"
#include "sqsd/planner.hpp"

namespace {

// range(0) is N, range(1) selects raw (0) or memoized (1) projection.
void BM_PlanBinary(benchmark::State& state) {
  sqsd::BinaryScenario scn;
  scn.resolution = static_cast<int>(state.range(0));
  scn.library_size = 31;
  scn.horizon = 2;
  const auto mode = state.range(1) ? sqsd::ProjectionMode::Memoized : sqsd::ProjectionMode::Raw;
  const auto cfg = sqsd::binary_config(scn, mode);
  for (auto _ : state) {
    sqsd::CostCounters counters;
    benchmark::DoNotOptimize(sqsd::plan(cfg, counters));
  }
  state.SetLabel(state.range(1) ? "memoized" : "raw");
}
BENCHMARK(BM_PlanBinary)
    ->ArgsProduct({{50, 100, 200, 400}, {0, 1}})
    ->Unit(benchmark::kMillisecond);

void BM_PlanTrine(benchmark::State& state) {
  sqsd::TrineScenario scn;
  scn.resolution = static_cast<int>(state.range(0));
  const auto cfg = sqsd::trine_config(scn);
  for (auto _ : state) {
    sqsd::CostCounters counters;
    benchmark::DoNotOptimize(sqsd::plan(cfg, counters));
  }
}
BENCHMARK(BM_PlanTrine)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_OneStepOpt(benchmark::State& state) {
  sqsd::BinaryScenario scn;
  scn.library_size = static_cast<std::size_t>(state.range(0));
  const auto cfg = sqsd::binary_config(scn);
  const std::vector<double> b{0.3, 0.7};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sqsd::one_step_opt(b, *cfg.table, *cfg.library));
  }
}
BENCHMARK(BM_OneStepOpt)->Arg(31)->Arg(181)->Arg(721);

}  // namespace
