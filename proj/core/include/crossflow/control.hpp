#pragma once

#include <optional>
#include <vector>

#include "crossflow/params.hpp"
#include "crossflow/types.hpp"

namespace crossflow {

/// Follower-relative state used by the safe-following controller.
struct CouplingState {
  double v_lead = 0.0;
  double v_self = 0.0;
  double sigma = 0.0;   // gap over safe-following distance
  double u_lead = 0.0;  // leader's same-step control decision
};

/// Minimum-effort arrival plan: at most one constant-acceleration segment to
/// an intermediate speed, a cruise, and one constant-acceleration segment to
/// the arrival speed.
struct ArrivalSegment {
  double duration;
  double accel;
};
struct ArrivalProfile {
  std::vector<ArrivalSegment> segments;
  double arrival_speed = 0.0;
  double total_effort = 0.0;  // integral of |u| over the profile
};

/// Minimum-effort profile reaching the stop line exactly `time_to_deadline`
/// seconds from now with arrival speed in [nu_nom, v_max], speeds in
/// [0, v_max] and accelerations in [u_min, u_max] throughout. Returns nullopt
/// when no such profile exists.
std::optional<ArrivalProfile> solve_arrival_profile(double pos, double vel,
                                                    double time_to_deadline, const Params& p);

/// Scheduled-arrival controller: the current acceleration of the minimum-
/// effort profile, or u_max when no feasible profile exists, the deadline
/// has passed, or the vehicle has crossed the stop line.
double g_uc(double pos, double vel, double deadline_abs, double now, const Params& p);

/// Controller that holds the safety ratio constant while the follower is at
/// least as fast as its leader.
double g_us(const CouplingState& zeta, const Params& p);

/// Safe-following controller: min of the arrival controller and g_us.
double g_sf(const CouplingState& zeta, double pos, double vel, double deadline_abs, double now,
            const Params& p);

/// True iff the follower is at least as fast as its leader and the safety
/// ratio lies in [1, sigma0].
bool in_coupling_set(const CouplingState& zeta, const Params& p);

struct ControlDecision {
  double u = 0.0;
  bool coupled = false;  // safe-following branch of the switching law taken
};

/// Largest acceleration not exceeding `u` whose one-step hold keeps the
/// safety ratio at or above 1. The switching law's cases are stated in
/// continuous time, where the coupling set cannot be jumped over; a sampled
/// step can cross from "slower than the leader" to "faster and too close"
/// without ever being inside it, so the chosen rate must be checked against
/// the state it actually produces.
double sigma_guard(const VehicleState& self, const VehicleState& lead, double u, const Params& p);

/// Switching law between the arrival controller and the safe-following
/// controller, with the at-speed-limit saturation cases. `lead` may be the
/// sentinel; `now` is absolute time. Result acceleration is always within
/// [u_min, u_max].
ControlDecision decide_control(const VehicleState& self, const VehicleState& lead, double now,
                               const Params& p);

/// decide_control's acceleration only.
double vehicle_control(const VehicleState& self, const VehicleState& lead, double now,
                       const Params& p);

}  // namespace crossflow
