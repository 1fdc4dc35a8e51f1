#include <benchmark/benchmark.h>

#include <random>

#include "crossflow/scheduler.hpp"

using namespace crossflow;

namespace {

ScheduleProblem make_instance(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ScheduleProblem pr;
  pr.v_max = 50.0 / 3.0;
  std::vector<double> branch_d(4, 0.0);
  for (int i = 0; i < n; ++i) {
    ScheduleBubble b;
    b.id = i;
    b.branch = 1 + i % 4;
    double prev = branch_d[b.branch - 1];
    b.d = prev == 0.0 ? 70.0 + unit(rng) * 180.0 : prev + 10.0 + unit(rng) * 50.0;
    branch_d[b.branch - 1] = b.d;
    b.vbar_max = 8.0 + unit(rng) * 8.0;
    b.vbar_min = 0.0;
    b.size = 1 + int(unit(rng) * 5);
    b.tau_occ = b.size * 1.58;
    pr.bubbles.push_back(b);
  }
  return pr;
}

}  // namespace

static void BM_BranchAndBound(benchmark::State& state) {
  auto pr = make_instance(int(state.range(0)), 9001);
  for (auto _ : state) {
    auto sol = branch_and_bound(pr);
    benchmark::DoNotOptimize(sol.cost);
  }
}
BENCHMARK(BM_BranchAndBound)->DenseRange(2, 8);

static void BM_BruteForceSchedule(benchmark::State& state) {
  auto pr = make_instance(int(state.range(0)), 9001);
  for (auto _ : state) {
    auto sol = brute_force_schedule(pr);
    benchmark::DoNotOptimize(sol.cost);
  }
}
BENCHMARK(BM_BruteForceSchedule)->DenseRange(2, 8);

static void BM_Velopt(benchmark::State& state) {
  auto pr = make_instance(8, 42);
  auto orders = enumerate_orders(pr);
  std::size_t i = 0;
  for (auto _ : state) {
    auto sol = velopt(pr, orders[i++ % orders.size()]);
    benchmark::DoNotOptimize(sol.cost);
  }
}
BENCHMARK(BM_Velopt);
