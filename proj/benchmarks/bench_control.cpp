#include <benchmark/benchmark.h>

#include <random>

#include "crossflow/control.hpp"
#include "crossflow/kinematics.hpp"

using namespace crossflow;

static void BM_ArrivalProfile(benchmark::State& state) {
  Params p;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> dpos(-300.0, -65.0), dvel(0.0, p.v_max), dwait(0.0, 30.0);
  std::vector<std::tuple<double, double, double>> cases;
  for (int i = 0; i < 256; ++i) {
    double pos = dpos(rng), vel = dvel(rng);
    cases.emplace_back(pos, vel, earliest_vehicle_approach(pos, vel, p) + dwait(rng));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    auto [pos, vel, T] = cases[i++ % cases.size()];
    auto prof = solve_arrival_profile(pos, vel, T, p);
    benchmark::DoNotOptimize(prof);
  }
}
BENCHMARK(BM_ArrivalProfile);

static void BM_VehicleControl(benchmark::State& state) {
  Params p;
  VehicleState lead;
  lead.id = 1;
  lead.pos = -40.0;
  lead.vel = 12.0;
  lead.accel = 0.5;
  VehicleState self;
  self.id = 2;
  self.pos = -60.0;
  self.vel = 13.0;
  self.deadline = 8.0;
  for (auto _ : state) {
    auto dec = decide_control(self, lead, 0.0, p);
    benchmark::DoNotOptimize(dec.u);
  }
}
BENCHMARK(BM_VehicleControl);
