#include "crossflow/trafficgen.hpp"

#include <cmath>

#include "crossflow/kinematics.hpp"

namespace crossflow {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

SpawnStream::SpawnStream(std::uint64_t base_seed, int branch)
    : rng_(splitmix64(splitmix64(base_seed) + static_cast<std::uint64_t>(branch))) {}

double SpawnStream::uniform01() {
  // 53-bit mantissa; avoids distribution objects so draws are identical
  // across standard libraries.
  return (rng_() >> 11) * 0x1.0p-53;
}

double SpawnStream::exponential(double mean) { return -mean * std::log1p(-uniform01()); }

std::vector<VehicleState> spawn_wave(const std::vector<VehicleState>& branch_vehicles, int branch,
                                     double t_s, SpawnStream& stream, int& next_id,
                                     const Params& p) {
  std::vector<VehicleState> spawned;
  const double entrance = p.staging_end();    // staging/mid boundary
  const double tail = p.staging_begin();

  // Last vehicle previously defined on the branch, or none.
  const VehicleState* prev = branch_vehicles.empty() ? nullptr : &branch_vehicles.back();

  while (true) {
    double sigma = 1.0 + stream.exponential(p.mu);
    double vel = stream.uniform01() * p.v_max;
    double pos = entrance;
    if (prev != nullptr) {
      double gap = sigma * safe_following_distance(prev->vel, vel, p);
      pos = std::min(entrance, prev->pos - gap);
    }
    if (pos < tail || pos > entrance) break;  // outside the staging zone: wave ends

    VehicleState v;
    v.id = next_id++;
    v.branch = branch;
    v.pos = pos;
    v.vel = vel;
    v.t_spawn = t_s;
    spawned.push_back(v);
    prev = &spawned.back();
  }
  return spawned;
}

}  // namespace crossflow
