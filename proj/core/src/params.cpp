#include "crossflow/params.hpp"

#include <cstdio>

namespace crossflow {

namespace {

std::string msg(const char* fmt, double lhs, double rhs) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), fmt, lhs, rhs);
  return buf;
}

}  // namespace

double exit_zone_requirement(const Params& p) {
  return p.v_max * p.v_max / (-2.0 * p.u_min) + p.nu_nom * p.nu_nom / (2.0 * p.u_max);
}

std::vector<std::string> validate_params(const Params& p) {
  std::vector<std::string> out;
  auto require = [&](bool ok, std::string m) {
    if (!ok) out.push_back(std::move(m));
  };

  require(p.u_min <= 0.0, msg("u_min <= 0 violated: %g > %g", p.u_min, 0.0));
  require(p.u_max >= 0.0, msg("u_max >= 0 violated: %g < %g", p.u_max, 0.0));
  require(p.nu_nom > 0.0, msg("nu_nom > 0 violated: %g <= %g", p.nu_nom, 0.0));
  require(p.nu_nom <= p.v_max, msg("nu_nom <= v_max violated: %g > %g", p.nu_nom, p.v_max));
  require(p.sigma0 > 1.0, msg("sigma0 > 1 violated: %g <= %g", p.sigma0, 1.0));
  require(p.vehicle_length > 0.0, msg("vehicle_length > 0 violated: %g <= %g", p.vehicle_length, 0.0));
  require(p.intersection_length > 0.0,
          msg("intersection_length > 0 violated: %g <= %g", p.intersection_length, 0.0));
  require(p.staging_length > 0.0, msg("staging_length > 0 violated: %g <= %g", p.staging_length, 0.0));
  require(p.mid_length > 0.0, msg("mid_length > 0 violated: %g <= %g", p.mid_length, 0.0));
  require(p.exit_length > 0.0, msg("exit_length > 0 violated: %g <= %g", p.exit_length, 0.0));
  require(p.dt > 0.0, msg("dt > 0 violated: %g <= %g", p.dt, 0.0));
  require(p.v_max > 0.0, msg("v_max > 0 violated: %g <= %g", p.v_max, 0.0));
  require(p.max_bubbles >= 1, msg("max_bubbles >= 1 violated: %g < %g", double(p.max_bubbles), 1.0));
  require(p.max_new_bubbles_branch >= 1,
          msg("max_new_bubbles_branch >= 1 violated: %g < %g", double(p.max_new_bubbles_branch), 1.0));
  require(p.w_t >= 0.0, msg("w_t >= 0 violated: %g < %g", p.w_t, 0.0));

  // Every vehicle must be clustered before leaving the staging zone.
  if (p.v_max > 0.0) {
    double bound = p.staging_length / p.v_max;
    require(p.t_cs < bound, msg("t_cs < staging_length / v_max violated: %g >= %g", p.t_cs, bound));
  }

  // Exit zone long enough to stop from v_max and re-accelerate to nu_nom,
  // which guarantees a feasible schedule always exists.
  if (p.u_min < 0.0 && p.u_max > 0.0) {
    double need = exit_zone_requirement(p);
    require(p.exit_length >= need,
            msg("exit_length >= v_max^2/(-2 u_min) + nu_nom^2/(2 u_max) violated: %g < %g",
                p.exit_length, need));
  } else {
    require(p.u_min < 0.0, msg("u_min < 0 violated: %g >= %g", p.u_min, 0.0));
    require(p.u_max > 0.0, msg("u_max > 0 violated: %g <= %g", p.u_max, 0.0));
  }

  if (p.t_iat_override) {
    require(*p.t_iat_override > 0.0, msg("t_iat_override > 0 violated: %g <= %g", *p.t_iat_override, 0.0));
  }
  return out;
}

}  // namespace crossflow
