#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "crossflow/params.hpp"

namespace crossflow {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr int kNumBranches = 4;

/// State of one vehicle. `pos` is the front of the vehicle, negative before
/// the stop line, 0 at it. Value record; the engine replaces it wholesale on
/// every step.
struct VehicleState {
  int id = -1;
  int branch = 1;  // in {1,2,3,4}
  double pos = 0.0;
  double vel = 0.0;
  double accel = 0.0;  // last applied input

  std::optional<double> deadline;  // assigned approach time (absolute)
  std::optional<int> bubble_id;

  double t_spawn = 0.0;
  std::optional<double> t_approach;  // realized approach time
  std::optional<double> t_exit;
  double cost_accum = 0.0;  // integral of (w_t + |u|) dt so far
};

/// Imaginary predecessor used when a vehicle has nobody ahead on its branch.
inline VehicleState sentinel_leader(const Params& p) {
  VehicleState v;
  v.id = -1;
  v.pos = kInf;
  v.vel = p.v_max;
  v.accel = 0.0;
  return v;
}

inline bool is_sentinel(const VehicleState& v) { return v.pos == kInf; }

/// A cluster of vehicles on one branch that crosses the intersection
/// together. `members` is ordered front first; membership is immutable after
/// creation. Snapshot quantities (lead_pos, lead_vel, windows) are refreshed
/// each time the bubble is fed to the scheduler.
struct Bubble {
  int id = -1;
  int branch = 1;
  std::vector<int> members;  // vehicle ids, front first

  double lead_pos = 0.0;
  double lead_vel = 0.0;
  double tau_occ_bar = 0.0;  // guaranteed occupancy upper bound

  std::optional<double> tau;  // assigned approach time (absolute)
  double tau_e = 0.0;         // earliest approach (absolute)
  double tau_l = kInf;        // latest approach (absolute, may be +inf)
  double vbar_min = 0.0;
  double vbar_max = 0.0;
  double scheduled_at = 0.0;  // last scheduling instant

  int size() const { return static_cast<int>(members.size()); }
};

/// Immediate-follower relation on a bubble snapshot: true iff `follower` is
/// on the same branch as `leader`, strictly behind it, and no third bubble
/// lies strictly between them. Throws std::invalid_argument on unknown ids.
bool follower_relation(const std::vector<Bubble>& bubbles, int leader_id, int follower_id);

}  // namespace crossflow
