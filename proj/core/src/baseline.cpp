#include "crossflow/baseline.hpp"

#include <algorithm>

#include "crossflow/kinematics.hpp"

namespace crossflow {

bool can_stop_before_line(const VehicleState& v, const Params& p) {
  double stop_dist = v.vel * v.vel / (2.0 * -p.u_min);
  return stop_dist <= -v.pos;
}

VehicleState virtual_stop_vehicle(const Params& p) {
  VehicleState v;
  v.id = -2;
  v.pos = p.vehicle_length;
  v.vel = 0.0;
  v.accel = 0.0;
  return v;
}

namespace {

bool crossed(const VehicleState& v, const Params& p) { return v.pos >= p.crossing_end(); }

void classify_yellow_branch(SignalState& st, const std::vector<VehicleState>& branch, const Params& p) {
  for (const VehicleState& v : branch) {
    if (crossed(v, p) || st.classified.count(v.id)) continue;
    st.classified.insert(v.id);
    if (!can_stop_before_line(v, p)) st.committed.insert(v.id);
  }
}

}  // namespace

SignalState signal_step(SignalState state, const std::vector<std::vector<VehicleState>>& vehicles_by_branch,
                        double now, const Params& p) {
  if (state.phase == SignalPhase::green && now + 1e-9 >= state.phase_start + p.green_time) {
    state.phase = SignalPhase::yellow;
    state.phase_start = now;
    state.committed.clear();
    state.classified.clear();
    state.virtual_active[state.active_branch - 1] = true;
  }
  if (state.phase == SignalPhase::yellow) {
    // Pick up late arrivals, then hand over once the committed group clears.
    classify_yellow_branch(state, vehicles_by_branch[state.active_branch - 1], p);
    bool cleared = true;
    for (const VehicleState& v : vehicles_by_branch[state.active_branch - 1]) {
      if (state.committed.count(v.id) && !crossed(v, p)) {
        cleared = false;
        break;
      }
    }
    if (cleared) {
      state.active_branch = state.active_branch % kNumBranches + 1;
      state.phase = SignalPhase::green;
      state.phase_start = now;
      state.committed.clear();
      state.classified.clear();
      state.virtual_active[state.active_branch - 1] = false;
    }
  }
  return state;
}

VehicleState baseline_leader(const std::vector<VehicleState>& branch_vehicles, std::size_t idx,
                             const SignalState& signal, const Params& p) {
  const VehicleState& self = branch_vehicles[idx];
  bool branch_held = signal.virtual_active[self.branch - 1];
  if (branch_held && !signal.committed.count(self.id) && self.pos < 0.0) {
    // The virtual vehicle leads the first vehicle that has to stop; everyone
    // behind it follows the real chain.
    bool first_stoppable = true;
    for (std::size_t j = 0; j < idx; ++j) {
      const VehicleState& ahead = branch_vehicles[j];
      if (!signal.committed.count(ahead.id) && ahead.pos < 0.0) {
        first_stoppable = false;
        break;
      }
    }
    if (first_stoppable) return virtual_stop_vehicle(p);
  }
  if (idx == 0) return sentinel_leader(p);
  return branch_vehicles[idx - 1];
}

ControlDecision baseline_decide_control(const VehicleState& self, const VehicleState& lead,
                                        const Params& p) {
  CouplingState zeta;
  zeta.v_lead = lead.vel;
  zeta.v_self = self.vel;
  zeta.u_lead = lead.accel;
  double gap = lead.pos - self.pos;
  zeta.sigma = is_sentinel(lead) ? kInf : safety_ratio({gap, lead.vel, self.vel}, p);

  bool at_limit = self.vel >= p.v_max;
  ControlDecision out;
  out.coupled = in_coupling_set(zeta, p);
  double u = out.coupled ? std::min(p.u_max, g_us(zeta, p)) : p.u_max;
  if (at_limit) u = saturate(u, p.u_min, 0.0);
  out.u = sigma_guard(self, lead, saturate(u, p.u_min, p.u_max), p);
  return out;
}

double baseline_vehicle_control(const VehicleState& self, const VehicleState& lead, const Params& p) {
  return baseline_decide_control(self, lead, p).u;
}

}  // namespace crossflow
