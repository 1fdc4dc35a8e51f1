#pragma once

#include <vector>

#include "crossflow/params.hpp"
#include "crossflow/types.hpp"

namespace crossflow {

/// Inputs of the safe-following-distance and safety-ratio computations.
struct SafetyPair {
  double gap = 0.0;     // leader front minus follower front
  double v_lead = 0.0;
  double v_follow = 0.0;
};

/// Clamp of u to [lo, hi]. Throws std::invalid_argument when lo > hi.
double saturate(double u, double lo, double hi);

/// Minimum gap that keeps two vehicles separated by at least the vehicle
/// length if both execute the maximum braking maneuver:
/// L + max{0, (v_follow^2 - v_lead^2) / (-2 u_min)}.
double safe_following_distance(double v_lead, double v_follow, const Params& p);

/// Safe distance and time spacing at nominal crossing conditions:
/// d_nom = D(nu_nom, v_max), t_nom = d_nom / nu_nom.
struct NominalQuantities {
  double d_nom;
  double t_nom;
};
NominalQuantities nominal_quantities(const Params& p);

/// Actual gap divided by the safe-following distance.
double safety_ratio(const SafetyPair& pair, const Params& p);

/// Duration for the front to reach the stop line under max acceleration
/// until v_max, cruising thereafter. pos must be < 0.
double earliest_vehicle_approach(double pos, double vel, const Params& p);

/// Duration to reach the stop line under constant max deceleration, or +inf
/// if the vehicle can stop strictly before it. Stopping exactly at the line
/// counts as finite.
double latest_vehicle_approach(double pos, double vel, const Params& p);

/// Piecewise-constant-acceleration motion over one step after clamping the
/// velocity to [0, v_max]. At most two segments: the commanded acceleration
/// until the clamp instant, zero acceleration after it.
struct Motion {
  double dx = 0.0;       // position advance over the step
  double v_end = 0.0;    // velocity at the end of the step
  double t_clamp = 0.0;  // time at which the clamp takes effect (= dt if never)
  double u = 0.0;        // commanded acceleration (applied on [0, t_clamp))
  double effort = 0.0;   // integral of |applied acceleration| over the step
};

/// Exact constant-acceleration update over dt with the velocity clamp
/// resolved analytically. Throws std::invalid_argument when u is outside
/// [u_min, u_max].
Motion integrate_motion(double vel, double u, double dt, const Params& p);

/// Position reached s seconds into a motion step (0 <= s <= dt).
double motion_position(const Motion& m, double vel, double s);

/// First time within the step at which x0 + displacement reaches `threshold`,
/// or a negative value if it is not reached. x0 is the position at the start
/// of the step.
double motion_crossing_time(const Motion& m, double vel, double x0, double threshold, double dt);

/// Integral of (w_t + |applied acceleration|) over the first s seconds of a
/// motion step. The clamp instant zeroes the acceleration contribution.
double motion_cost(const Motion& m, double w_t, double s);

/// Applies integrate_motion to a vehicle record: advances position and
/// velocity, stores the applied acceleration, and accumulates the
/// (w_t + |u|) dt cost over the whole step.
VehicleState step_integrate(const VehicleState& state, double u, double dt, const Params& p);

}  // namespace crossflow
