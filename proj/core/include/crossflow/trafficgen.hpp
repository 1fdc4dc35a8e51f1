#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "crossflow/params.hpp"
#include "crossflow/types.hpp"

namespace crossflow {

/// Seeded random stream for one branch. Streams for different branches are
/// derived independently from the base seed, so waves can be generated in
/// any order without changing the draws.
class SpawnStream {
 public:
  SpawnStream(std::uint64_t base_seed, int branch);

  double uniform01();                 // [0, 1)
  double exponential(double mean);    // mean > 0

 private:
  std::mt19937_64 rng_;
};

/// One spawn wave on a branch at a clustering instant. Draws headroom ratios
/// sigma = 1 + Exp(mu) and uniform speeds, places each candidate the safe
/// distance times sigma behind the previous vehicle (capped at the staging
/// entrance), and stops at the first candidate that falls outside the
/// staging zone. `branch_vehicles` is the branch front first; `next_id` is
/// advanced for every accepted vehicle.
std::vector<VehicleState> spawn_wave(const std::vector<VehicleState>& branch_vehicles, int branch,
                                     double t_s, SpawnStream& stream, int& next_id,
                                     const Params& p);

}  // namespace crossflow
