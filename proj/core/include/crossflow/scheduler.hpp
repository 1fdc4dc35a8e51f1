#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "crossflow/params.hpp"
#include "crossflow/types.hpp"

namespace crossflow {

/// Fuel-cost abstraction per bubble: F(vbar) = f0 + f1 (v_max - vbar),
/// positive and monotonically decreasing on [0, v_max].
struct FuelModel {
  double f0 = 1.0;
  double f1 = 0.1;
  double eval(double vbar, double v_max) const { return f0 + f1 * (v_max - vbar); }
};

/// One bubble as seen by the scheduler.
struct ScheduleBubble {
  int id = -1;
  int branch = 1;
  double d = 0.0;  // distance of the lead vehicle to the stop line at t_s
  double vbar_min = 0.0;
  double vbar_max = 0.0;
  double tau_occ = 0.0;  // guaranteed occupancy upper bound
  int size = 1;
};

struct ScheduleProblem {
  double t_s = 0.0;
  double tau_min = 0.0;  // absolute; no bubble may approach earlier
  std::vector<ScheduleBubble> bubbles;
  FuelModel fuel;
  double w_t = 1.0;
  double v_max = 50.0 / 3.0;

  /// Per-bubble cost at a given average velocity:
  /// size * (w_t * d / vbar + F(vbar)).
  double phi(const ScheduleBubble& b, double vbar) const {
    return b.size * (w_t * b.d / vbar + fuel.eval(vbar, v_max));
  }
};

struct ScheduleSolution {
  std::vector<int> order;   // bubble ids, first to cross first
  std::vector<double> vbar; // aligned with `order`
  std::vector<double> tau;  // absolute approach times, aligned with `order`
  double cost = kInf;
  bool feasible = false;
};

/// Partial schedule: a committed prefix plus chained velocity upper bounds
/// for everything not yet ordered.
struct BnbNode {
  std::vector<int> prefix;              // bubble ids in committed order
  std::vector<double> prefix_vbar;      // aligned with prefix
  std::vector<std::vector<int>> queues; // residual per-branch queues (ids)
  std::vector<double> bound_vbar;       // per-bubble index into problem.bubbles
  double lower_bound = 0.0;
};

struct BnbStats {
  long nodes_visited = 0;
  long nodes_pruned = 0;
  long leaves_evaluated = 0;
  // Filled only when recording is requested: every visited node's prefix and
  // Eq-style lower bound, for admissibility audits.
  std::vector<std::pair<std::vector<int>, double>> visited;
};

/// Occupancy upper bound for a bubble of `size` vehicles:
/// (size - 1) t_iat + max{(L + Delta) / nu_nom, t_iat}.
double occupancy_bound(int size, double t_iat, const Params& p);

/// Upper bound on inter-approach times of consecutive vehicles in a bubble.
/// Returns the override when configured; otherwise evaluates the worst-case
/// follower recovery formula.
double inter_approach_bound(const Params& p);

/// Velocity window of a bubble from its members' kinematic states at t_s.
/// Includes the tau_min clamp on vbar_max. Throws std::runtime_error when
/// the window is empty (vbar_max < vbar_min).
struct VelocityWindow {
  double tau_e;     // absolute earliest approach
  double tau_l;     // absolute latest approach (may be +inf)
  double vbar_max;
  double vbar_min;
};
VelocityWindow bubble_velocity_window(const std::vector<VehicleState>& members_front_first,
                                      double t_s, double tau_min, const Params& p);

/// Coefficients of the average-velocity form of the ordering constraint
/// between a predecessor q and a successor i: c = d_q / d_i, b = tau_occ_q / d_i.
struct CouplingCoeffs {
  double c;
  double b;
};
CouplingCoeffs coupling_coeffs(double d_q, double d_i, double tau_occ_q);

/// Optimal average velocities for a fixed crossing order. The chain is
/// greedy-maximal: the first bubble takes its cap, each next one the
/// tightest of its cap and the predecessor constraint. Infeasible orders
/// (some vbar below its lower limit) come back with cost = +inf.
ScheduleSolution velopt(const ScheduleProblem& problem, const std::vector<int>& order);

/// Propagates chained velocity upper bounds to all unscheduled bubbles given
/// the node's committed prefix. Updates node.bound_vbar in place.
void velbound(BnbNode& node, const ScheduleProblem& problem);

/// Lower bound on the cost of any completion of the node's prefix:
/// committed costs plus each unscheduled bubble at its bound velocity.
double subtree_lower_bound(const BnbNode& node, const ScheduleProblem& problem);

/// Exact minimum-cost schedule over all orders respecting per-branch
/// arrival order. Deterministic depth-first branch-and-bound; children are
/// expanded in ascending lower-bound order with ties broken by bubble id.
/// Throws std::runtime_error when no feasible order exists.
ScheduleSolution branch_and_bound(const ScheduleProblem& problem, BnbStats* stats = nullptr,
                                  bool record_nodes = false);

/// Test oracle: enumerates every order respecting per-branch arrival order
/// and returns the best velopt result. Refuses instances with more than
/// `max_n` bubbles (default 8).
ScheduleSolution brute_force_schedule(const ScheduleProblem& problem, int max_n = 8);

/// Enumerates all completions of a given prefix (used by bound audits).
std::vector<std::vector<int>> enumerate_orders(const ScheduleProblem& problem,
                                               const std::vector<int>& prefix = {});

/// Line-oriented instance format: header "t_s tau_min", then one bubble per
/// line "id branch d vbar_min vbar_max tau_occ size". '#' starts a comment.
ScheduleProblem parse_schedule_instance(std::istream& in);
std::string format_schedule_instance(const ScheduleProblem& problem);

}  // namespace crossflow
