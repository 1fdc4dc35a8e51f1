#pragma once

#include <optional>
#include <string>
#include <vector>

namespace crossflow {

/// System parameters of the intersection and the coordination algorithms.
///
/// All distances are meters, speeds m/s, accelerations m/s^2, times seconds.
/// Positions are measured along a branch with the stop line at 0; positions
/// before the intersection are negative.
struct Params {
  double vehicle_length = 4.0;        // L
  double intersection_length = 12.0;  // Delta

  // Incoming-branch zone lengths, from far to near: staging, mid, exit.
  double staging_length = 70.0;  // L_s
  double mid_length = 70.0;      // L_m
  double exit_length = 70.0;     // L_e

  double v_max = 50.0 / 3.0;  // speed limit (60 km/h)
  double u_max = 3.0;         // max acceleration
  double u_min = -4.0;        // max deceleration (<= 0)

  double nu_nom = 40.0 / 3.0;  // nominal crossing speed (48 km/h)
  double sigma0 = 1.2;         // coupling-set width parameter (> 1)

  double t_cs = 3.77;  // clustering/scheduling period
  int max_bubbles = 8;             // cap on bubbles per scheduling instance
  int max_new_bubbles_branch = 2;  // cap on new bubbles per branch per instance

  double w_t = 1.0;       // travel-time weight in the cost integrand
  double mu = 0.5;        // traffic-density parameter (spawn headroom mean - 1)
  double green_time = 10.0;  // baseline signal green duration

  double dt = 0.01;  // integration step

  // When set, replaces the computed upper bound on inter-approach times.
  std::optional<double> t_iat_override;

  // Derived zone boundaries (positions, all negative).
  double staging_begin() const { return -(exit_length + mid_length + staging_length); }
  double staging_end() const { return -(exit_length + mid_length); }
  double mid_end() const { return -exit_length; }
  double crossing_end() const { return intersection_length + vehicle_length; }
};

/// Checks every parameter invariant. Returns one human-readable message per
/// violated inequality, with both sides evaluated; empty means valid.
std::vector<std::string> validate_params(const Params& p);

/// Right-hand side of the exit-zone length requirement:
/// v_max^2 / (-2 u_min) + nu_nom^2 / (2 u_max).
double exit_zone_requirement(const Params& p);

}  // namespace crossflow
