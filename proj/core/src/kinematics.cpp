#include "crossflow/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crossflow {

double saturate(double u, double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("saturate: lo > hi");
  return std::min(std::max(u, lo), hi);
}

double safe_following_distance(double v_lead, double v_follow, const Params& p) {
  double closing = (v_follow * v_follow - v_lead * v_lead) / (-2.0 * p.u_min);
  return p.vehicle_length + std::max(0.0, closing);
}

NominalQuantities nominal_quantities(const Params& p) {
  double d_nom = safe_following_distance(p.nu_nom, p.v_max, p);
  return {d_nom, d_nom / p.nu_nom};
}

double safety_ratio(const SafetyPair& pair, const Params& p) {
  return pair.gap / safe_following_distance(pair.v_lead, pair.v_follow, p);
}

double earliest_vehicle_approach(double pos, double vel, const Params& p) {
  double d = -pos;
  if (d <= 0.0) return 0.0;
  double t_rise = (p.v_max - vel) / p.u_max;
  double d_rise = vel * t_rise + 0.5 * p.u_max * t_rise * t_rise;
  if (d_rise >= d) {
    // Reaches the line while still accelerating.
    return (std::sqrt(vel * vel + 2.0 * p.u_max * d) - vel) / p.u_max;
  }
  return t_rise + (d - d_rise) / p.v_max;
}

double latest_vehicle_approach(double pos, double vel, const Params& p) {
  double d = -pos;
  if (d <= 0.0) return 0.0;
  double brake = -p.u_min;
  double stop_dist = vel * vel / (2.0 * brake);
  if (stop_dist < d) return kInf;
  // First root of d = vel t - brake t^2 / 2; stopping exactly at the line
  // lands on the double root vel / brake.
  double disc = std::max(0.0, vel * vel - 2.0 * brake * d);
  return (vel - std::sqrt(disc)) / brake;
}

Motion integrate_motion(double vel, double u, double dt, const Params& p) {
  if (u < p.u_min - 1e-12 || u > p.u_max + 1e-12) {
    throw std::invalid_argument("integrate_motion: acceleration outside [u_min, u_max]");
  }
  Motion m;
  m.u = u;
  m.t_clamp = dt;
  double v_end = vel + u * dt;
  if (u > 0.0 && v_end > p.v_max) {
    m.t_clamp = (p.v_max - vel) / u;
    v_end = p.v_max;
  } else if (u < 0.0 && v_end < 0.0) {
    m.t_clamp = -vel / u;
    v_end = 0.0;
  }
  m.t_clamp = std::clamp(m.t_clamp, 0.0, dt);
  m.v_end = v_end;
  double tc = m.t_clamp;
  m.dx = vel * tc + 0.5 * u * tc * tc + v_end * (dt - tc);
  m.effort = std::abs(u) * tc;
  return m;
}

double motion_position(const Motion& m, double vel, double s) {
  if (s <= m.t_clamp) return vel * s + 0.5 * m.u * s * s;
  double tc = m.t_clamp;
  return vel * tc + 0.5 * m.u * tc * tc + m.v_end * (s - tc);
}

double motion_crossing_time(const Motion& m, double vel, double x0, double threshold, double dt) {
  double target = threshold - x0;
  if (target <= 0.0) return 0.0;
  if (m.dx < target) return -1.0;
  // Try the accelerating piece first.
  double tc = m.t_clamp;
  double d_clamp = vel * tc + 0.5 * m.u * tc * tc;
  if (target <= d_clamp && m.u != 0.0) {
    double disc = vel * vel + 2.0 * m.u * target;
    if (disc >= 0.0) {
      double t = (std::sqrt(disc) - vel) / m.u;
      if (m.u < 0.0) t = (vel - std::sqrt(disc)) / (-m.u);
      if (t >= 0.0 && t <= tc + 1e-12) return std::min(t, dt);
    }
  }
  if (target <= d_clamp && m.u == 0.0) {
    return vel > 0.0 ? std::min(target / vel, dt) : -1.0;
  }
  if (m.v_end <= 0.0) return -1.0;
  double t = tc + (target - d_clamp) / m.v_end;
  return t <= dt + 1e-12 ? std::min(t, dt) : -1.0;
}

double motion_cost(const Motion& m, double w_t, double s) {
  return w_t * s + std::abs(m.u) * std::min(s, m.t_clamp);
}

VehicleState step_integrate(const VehicleState& state, double u, double dt, const Params& p) {
  Motion m = integrate_motion(state.vel, u, dt, p);
  VehicleState next = state;
  next.pos = state.pos + m.dx;
  next.vel = m.v_end;
  next.accel = u;
  next.cost_accum = state.cost_accum + motion_cost(m, p.w_t, dt);
  return next;
}

}  // namespace crossflow
