#pragma once

#include <array>
#include <set>
#include <vector>

#include "crossflow/control.hpp"
#include "crossflow/params.hpp"
#include "crossflow/types.hpp"

namespace crossflow {

enum class SignalPhase { green, yellow };

/// Round-robin traffic signal. Exactly one branch holds the right of way
/// (green or yellow); every other branch keeps a virtual stopped vehicle at
/// position L that the switching law turns into a stop at the line.
struct SignalState {
  int active_branch = 1;
  SignalPhase phase = SignalPhase::green;
  double phase_start = 0.0;
  std::set<int> committed;   // vehicles that cannot stop and must clear
  std::set<int> classified;  // vehicles already split at this yellow
  std::array<bool, kNumBranches> virtual_active = {false, true, true, true};
};

/// Stopping test: can the vehicle come to rest before the stop line.
bool can_stop_before_line(const VehicleState& v, const Params& p);

/// Advances the signal: green turns yellow after green_time, splitting the
/// active branch's vehicles into stoppable and committed; yellow hands the
/// right of way to the next branch once every committed vehicle has left the
/// crossing. Late arrivals on a yellow branch are classified on first sight.
SignalState signal_step(SignalState state, const std::vector<std::vector<VehicleState>>& vehicles_by_branch,
                        double now, const Params& p);

/// Virtual stopped vehicle holding a branch at the line.
VehicleState virtual_stop_vehicle(const Params& p);

/// Leader seen by vehicle `idx` on its branch under the signal policy:
/// the real predecessor, or the virtual vehicle for the first vehicle that
/// has to stop. `branch_vehicles` is front first.
VehicleState baseline_leader(const std::vector<VehicleState>& branch_vehicles, std::size_t idx,
                             const SignalState& signal, const Params& p);

/// Switching-law control with the arrival controller replaced by full
/// throttle: free vehicles floor it, coupled vehicles follow safely.
ControlDecision baseline_decide_control(const VehicleState& self, const VehicleState& lead,
                                        const Params& p);
double baseline_vehicle_control(const VehicleState& self, const VehicleState& lead, const Params& p);

}  // namespace crossflow
