#include "crossflow/control.hpp"

#include <algorithm>
#include <cmath>

#include "crossflow/kinematics.hpp"

namespace crossflow {

namespace {

constexpr double kTiny = 1e-12;

// Minimum area covered by monotone speed adjustment from vel to v_f within T,
// adjusting at the maximum rate as late as possible.
double mono_area_lo(double vel, double v_f, double T, const Params& p) {
  if (v_f >= vel) return vel * T + (v_f - vel) * (v_f - vel) / (2.0 * p.u_max);
  return v_f * T + (vel - v_f) * (vel - v_f) / (2.0 * -p.u_min);
}

// Maximum area: adjust at the maximum rate as early (up) or late (down) as
// the direction allows.
double mono_area_hi(double vel, double v_f, double T, const Params& p) {
  if (v_f >= vel) return v_f * T - (v_f - vel) * (v_f - vel) / (2.0 * p.u_max);
  return vel * T - (vel - v_f) * (vel - v_f) / (2.0 * -p.u_min);
}

void push_segment(ArrivalProfile& prof, double duration, double accel) {
  if (duration > kTiny) prof.segments.push_back({duration, accel});
}

// Single-adjustment profile: rate-limited speed change from vel to v_f placed
// so that the enclosed area equals d, with cruise at an intermediate speed w.
ArrivalProfile build_monotone(double vel, double v_f, double T, double d, const Params& p) {
  ArrivalProfile prof;
  prof.arrival_speed = v_f;
  prof.total_effort = std::abs(v_f - vel);
  double rate = v_f >= vel ? p.u_max : p.u_min;
  double t_adj = (v_f - vel) / rate;
  double slack = T - t_adj;
  if (slack <= kTiny) {
    push_segment(prof, T, rate);
    return prof;
  }
  double fixed = v_f >= vel ? (v_f * v_f - vel * vel) / (2.0 * p.u_max)
                            : (vel * vel - v_f * v_f) / (2.0 * -p.u_min);
  double w = (d - fixed) / slack;
  w = std::clamp(w, std::min(vel, v_f), std::max(vel, v_f));
  double t1 = std::abs(w - vel) / std::abs(rate);
  double t3 = std::abs(v_f - w) / std::abs(rate);
  push_segment(prof, t1, rate);
  push_segment(prof, T - t1 - t3, 0.0);
  push_segment(prof, t3, rate);
  return prof;
}

// Dip profile: brake to w at u_min, cruise, accelerate to v_f at u_max.
ArrivalProfile build_dip(double vel, double v_f, double w, double T, const Params& p) {
  ArrivalProfile prof;
  prof.arrival_speed = v_f;
  prof.total_effort = (vel - w) + (v_f - w);
  double t1 = (vel - w) / -p.u_min;
  double t3 = (v_f - w) / p.u_max;
  push_segment(prof, t1, p.u_min);
  push_segment(prof, T - t1 - t3, 0.0);
  push_segment(prof, t3, p.u_max);
  return prof;
}

}  // namespace

std::optional<ArrivalProfile> solve_arrival_profile(double pos, double vel,
                                                    double time_to_deadline, const Params& p) {
  if (pos >= 0.0 || time_to_deadline <= 0.0) return std::nullopt;
  const double d = -pos;
  const double T = time_to_deadline;
  const double brake = -p.u_min;

  // Arrival speeds reachable within T under the rate limits.
  const double vf_lo = std::max(p.nu_nom, vel - brake * T);
  const double vf_hi = std::min(p.v_max, vel + p.u_max * T);
  if (vf_lo > vf_hi) return std::nullopt;

  const double v_c = std::clamp(vel, vf_lo, vf_hi);

  if (d > mono_area_hi(vel, vf_hi, T, p) + kTiny) return std::nullopt;  // too far

  if (d > mono_area_hi(vel, v_c, T, p)) {
    // Need a faster arrival: smallest v_f whose front-loaded profile covers d.
    // Solve v_f T - (v_f - vel)^2 / (2 u_max) = d (increasing in v_f here).
    double s = p.u_max * T + vel;
    double disc = std::max(0.0, s * s - vel * vel - 2.0 * p.u_max * d);
    double v_f = s - std::sqrt(disc);
    v_f = std::clamp(v_f, v_c, vf_hi);
    return build_monotone(vel, v_f, T, d, p);
  }

  if (d >= mono_area_lo(vel, v_c, T, p)) {
    return build_monotone(vel, v_c, T, d, p);
  }

  if (d >= mono_area_lo(vel, vf_lo, T, p)) {
    // Slow arrival: largest v_f whose back-loaded profile stays above d.
    // On [vf_lo, vel]: solve v_f T + (vel - v_f)^2 / (2 brake) = d.
    double disc = brake * (brake * T * T - 2.0 * T * vel + 2.0 * d);
    double v_f = (vel - brake * T) + std::sqrt(std::max(0.0, disc));
    v_f = std::clamp(v_f, vf_lo, v_c);
    return build_monotone(vel, v_f, T, d, p);
  }

  // Dip below both endpoint speeds, arriving at the slowest admissible speed.
  const double v_f = vf_lo;
  const double alpha = 1.0 / (2.0 * brake);
  const double beta = 1.0 / (2.0 * p.u_max);
  const double A = alpha + beta;
  const double B = T - 2.0 * alpha * vel - 2.0 * beta * v_f;
  const double C = alpha * vel * vel + beta * v_f * v_f - d;
  const double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) return std::nullopt;  // even the deepest dip covers too much
  double w;
  if (B > 0.0) {
    w = 2.0 * C / (-B - std::sqrt(disc));
  } else {
    w = (-B + std::sqrt(disc)) / (2.0 * A);
  }
  if (w < -1e-9) return std::nullopt;  // would need to wait below standstill
  w = std::clamp(w, 0.0, std::min(vel, v_f));
  // Cruise duration must be nonnegative: reject when the V-shape cannot fit.
  if ((vel - w) / brake + (v_f - w) / p.u_max > T + 1e-9) return std::nullopt;
  return build_dip(vel, v_f, w, T, p);
}

namespace {

// Discrete endgame: within the last control period before the deadline a
// single constant acceleration must land on the stop line on time, carry at
// least the nominal crossing speed across it, and still be at or above that
// speed at the end of the period (the hold extends past the line). Taking
// the largest requirement crosses no later and no slower.
double endgame_accel(double pos, double vel, double t_rem, const Params& p) {
  double d = -pos;
  double u_deadline = 2.0 * (d - vel * t_rem) / (t_rem * t_rem);
  double u_speed = (p.nu_nom * p.nu_nom - vel * vel) / (2.0 * d);
  double u_hold = (p.nu_nom - vel) / p.dt;
  return saturate(std::max({u_deadline, u_speed, u_hold}), p.u_min, p.u_max);
}

}  // namespace

double g_uc(double pos, double vel, double deadline_abs, double now, const Params& p) {
  if (pos >= 0.0 || now > deadline_abs) return p.u_max;
  double t_rem = deadline_abs - now;
  if (t_rem <= kTiny) return p.u_max;
  if (t_rem <= p.dt) return endgame_accel(pos, vel, t_rem, p);
  auto prof = solve_arrival_profile(pos, vel, t_rem, p);
  if (!prof) return p.u_max;
  // Held constant for one control period, so return the rate whose hold
  // lands on the profile velocity at the period end. Returning the raw
  // first-segment rate instead makes states on a segment boundary chatter
  // between the extremes and drift off the profile.
  double taken = 0.0, v = vel;
  for (const auto& seg : prof->segments) {
    double span = std::min(seg.duration, p.dt - taken);
    v += seg.accel * span;
    taken += span;
    if (taken >= p.dt - kTiny) break;
  }
  return taken > 0.0 ? (v - vel) / taken : 0.0;
}

double g_us(const CouplingState& zeta, const Params& p) {
  if (zeta.v_self == 0.0) return zeta.u_lead;
  double brake = -p.u_min;
  return ((zeta.v_lead / zeta.v_self) * (1.0 + zeta.sigma * zeta.u_lead / brake) - 1.0) *
         (brake / zeta.sigma);
}

double g_sf(const CouplingState& zeta, double pos, double vel, double deadline_abs, double now,
            const Params& p) {
  return std::min(g_uc(pos, vel, deadline_abs, now, p), g_us(zeta, p));
}

bool in_coupling_set(const CouplingState& zeta, const Params& p) {
  return zeta.v_self >= zeta.v_lead && zeta.sigma >= 1.0 && zeta.sigma <= p.sigma0;
}

double sigma_guard(const VehicleState& self, const VehicleState& lead, double u, const Params& p) {
  if (is_sentinel(lead)) return u;
  double gap = lead.pos - self.pos;
  if (safety_ratio({gap, lead.vel, self.vel}, p) < 1.0) return u;  // not ours to restore
  Motion lead_m = integrate_motion(lead.vel, saturate(lead.accel, p.u_min, p.u_max), p.dt, p);
  auto post_sigma = [&](double uu) {
    Motion self_m = integrate_motion(self.vel, uu, p.dt, p);
    return safety_ratio({gap + lead_m.dx - self_m.dx, lead_m.v_end, self_m.v_end}, p);
  };
  if (post_sigma(u) >= 1.0) return u;
  double lo = p.u_min, hi = u;
  if (post_sigma(lo) < 1.0) return lo;  // braking flat out is all that is left
  // post_sigma decreases in the acceleration, so bisect for the largest safe one.
  for (int i = 0; i < 60; ++i) {
    double mid = 0.5 * (lo + hi);
    (post_sigma(mid) >= 1.0 ? lo : hi) = mid;
  }
  return lo;
}

ControlDecision decide_control(const VehicleState& self, const VehicleState& lead, double now,
                               const Params& p) {
  CouplingState zeta;
  zeta.v_lead = lead.vel;
  zeta.v_self = self.vel;
  zeta.u_lead = lead.accel;
  double gap = lead.pos - self.pos;
  zeta.sigma = is_sentinel(lead) ? kInf : safety_ratio({gap, lead.vel, self.vel}, p);

  double deadline = self.deadline ? *self.deadline : -kInf;  // no deadline: arrival infeasible
  bool at_limit = self.vel >= p.v_max;

  ControlDecision out;
  out.coupled = in_coupling_set(zeta, p);
  double u = out.coupled ? g_sf(zeta, self.pos, self.vel, deadline, now, p)
                         : g_uc(self.pos, self.vel, deadline, now, p);
  if (at_limit) u = saturate(u, p.u_min, 0.0);
  out.u = sigma_guard(self, lead, saturate(u, p.u_min, p.u_max), p);
  return out;
}

double vehicle_control(const VehicleState& self, const VehicleState& lead, double now,
                       const Params& p) {
  return decide_control(self, lead, now, p).u;
}

}  // namespace crossflow
