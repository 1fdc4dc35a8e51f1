#include <benchmark/benchmark.h>

#include "crossflow/engine.hpp"

using namespace crossflow;

static void BM_Simulation(benchmark::State& state) {
  SimConfig cfg;
  cfg.mode = state.range(0) == 0 ? Mode::hd : Mode::signal;
  cfg.params.t_iat_override = 1.58;
  cfg.params.mu = 0.5;
  cfg.seed = 21;
  cfg.stop.kind = StopRule::Kind::time_limit;
  cfg.stop.time_limit = 30.0;
  for (auto _ : state) {
    auto res = run_simulation(cfg);
    benchmark::DoNotOptimize(res.metrics.crossed);
  }
}
BENCHMARK(BM_Simulation)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
