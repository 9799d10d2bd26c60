#include <benchmark/benchmark.h>

#include "codesign/empc.hpp"

namespace {

using namespace codesign;

ExogenousSeries varied_series(double span_hours) {
  SynthConfig cfg;
  cfg.span_hours = span_hours;
  cfg.resolution_min = 15.0;
  cfg.temp_mean_c = 8.0;
  cfg.temp_annual_amp_c = 0.0;
  cfg.price_spread = 0.12;
  return synthesize(cfg, 17);
}

// One full OCP transcription + cold solve at the given horizon (hours).
void BM_PlanColdStart(benchmark::State& state) {
  const auto model = PlantModel::make(BuildingParams{}, AssetParams{});
  ControllerParams pc;
  pc.n_f = static_cast<int>(state.range(0));
  const auto series = varied_series(pc.horizon_hours() + 12.0);
  const SizingParams p{8, 20};
  for (auto _ : state) {
    auto ocp = plan({19.0, 0.0}, resample(series, pc.T_d_min()), 0, p, pc, model, {});
    benchmark::DoNotOptimize(ocp.open_loop_cost);
  }
}

// Receding-horizon day: 96 warm-started solves at T_s = 15 min.
void BM_ClosedLoopDay(benchmark::State& state) {
  const auto model = PlantModel::make(BuildingParams{}, AssetParams{});
  ControllerParams pc;
  pc.n_f = static_cast<int>(state.range(0));
  const auto series = varied_series(24.0 + pc.horizon_hours() + 12.0);
  const SizingParams p{8, 20};
  for (auto _ : state) {
    auto run = closed_loop({19.0, 0.0}, series, p, pc, model, {}, 24.0);
    benchmark::DoNotOptimize(run.v_cl.data());
  }
}

}  // namespace

BENCHMARK(BM_PlanColdStart)->Arg(12)->Arg(24);
BENCHMARK(BM_ClosedLoopDay)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
