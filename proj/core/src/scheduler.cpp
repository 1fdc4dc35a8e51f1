#include "crossflow/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "crossflow/kinematics.hpp"

namespace crossflow {

double occupancy_bound(int size, double t_iat, const Params& p) {
  double crossing = (p.vehicle_length + p.intersection_length) / p.nu_nom;
  return (size - 1) * t_iat + std::max(crossing, t_iat);
}

double inter_approach_bound(const Params& p) {
  if (p.t_iat_override) return *p.t_iat_override;
  double t_nom = nominal_quantities(p).t_nom;
  double base = p.sigma0 * t_nom;
  // Slowest speed the coupling can force on a follower.
  double v_low = (-p.u_min * p.v_max) / (-p.u_min + p.sigma0 * p.u_max);
  if (v_low >= p.nu_nom) return base;
  double t_fol = (p.nu_nom * p.nu_nom - v_low * v_low) / (2.0 * p.u_max * p.v_max) +
                 p.sigma0 * safe_following_distance(v_low, p.v_max, p) / p.v_max +
                 (p.nu_nom - v_low) / p.u_max;
  return std::max(base, t_fol);
}

VelocityWindow bubble_velocity_window(const std::vector<VehicleState>& members_front_first,
                                      double t_s, double tau_min, const Params& p) {
  if (members_front_first.empty()) {
    throw std::invalid_argument("bubble_velocity_window: no members");
  }
  double t_nom = nominal_quantities(p).t_nom;
  double d = -members_front_first.front().pos;

  double earliest = 0.0;
  double latest = kInf;
  for (std::size_t j = 0; j < members_front_first.size(); ++j) {
    const VehicleState& v = members_front_first[j];
    double offset = double(j) * t_nom;
    earliest = std::max(earliest, earliest_vehicle_approach(v.pos, v.vel, p) - offset);
    double lv = latest_vehicle_approach(v.pos, v.vel, p);
    if (lv != kInf) latest = std::min(latest, lv - offset);
  }

  VelocityWindow w;
  w.tau_e = t_s + earliest;
  w.tau_l = latest == kInf ? kInf : t_s + latest;
  w.vbar_max = std::min(p.v_max, d / earliest);
  if (tau_min > t_s) w.vbar_max = std::min(w.vbar_max, d / (tau_min - t_s));
  w.vbar_min = latest == kInf ? 0.0 : d / latest;
  if (w.vbar_max < w.vbar_min) {
    throw std::runtime_error("bubble_velocity_window: empty window (schedule infeasible)");
  }
  return w;
}

CouplingCoeffs coupling_coeffs(double d_q, double d_i, double tau_occ_q) {
  return {d_q / d_i, tau_occ_q / d_i};
}

namespace {

const ScheduleBubble& bubble_by_id(const ScheduleProblem& pr, int id) {
  for (const auto& b : pr.bubbles) {
    if (b.id == id) return b;
  }
  throw std::invalid_argument("scheduler: unknown bubble id");
}

std::size_t index_by_id(const ScheduleProblem& pr, int id) {
  for (std::size_t i = 0; i < pr.bubbles.size(); ++i) {
    if (pr.bubbles[i].id == id) return i;
  }
  throw std::invalid_argument("scheduler: unknown bubble id");
}

// Velocity cap induced on `next` by its predecessor crossing at vbar_prev.
double chain_velocity(const ScheduleBubble& prev, const ScheduleBubble& next, double vbar_prev) {
  auto [c, b] = coupling_coeffs(prev.d, next.d, prev.tau_occ);
  return vbar_prev / (c + b * vbar_prev);
}

// Effective cap after folding the tau_min constraint into vbar_max.
double capped_vbar_max(const ScheduleProblem& pr, const ScheduleBubble& b) {
  double cap = b.vbar_max;
  if (pr.tau_min > pr.t_s) cap = std::min(cap, b.d / (pr.tau_min - pr.t_s));
  return cap;
}

// Per-branch queues in arrival order (ascending d), ties by id.
std::vector<std::vector<int>> build_queues(const ScheduleProblem& pr) {
  std::vector<std::vector<int>> queues(kNumBranches);
  std::vector<const ScheduleBubble*> sorted;
  for (const auto& b : pr.bubbles) sorted.push_back(&b);
  std::sort(sorted.begin(), sorted.end(), [](const ScheduleBubble* a, const ScheduleBubble* b) {
    if (a->d != b->d) return a->d < b->d;
    return a->id < b->id;
  });
  for (const auto* b : sorted) {
    if (b->branch < 1 || b->branch > kNumBranches) {
      throw std::invalid_argument("scheduler: branch outside 1..4");
    }
    queues[b->branch - 1].push_back(b->id);
  }
  return queues;
}

}  // namespace

ScheduleSolution velopt(const ScheduleProblem& problem, const std::vector<int>& order) {
  ScheduleSolution sol;
  sol.order = order;
  sol.vbar.resize(order.size());
  sol.tau.resize(order.size());
  sol.cost = 0.0;
  sol.feasible = true;

  const ScheduleBubble* prev = nullptr;
  double prev_vbar = 0.0;
  for (std::size_t h = 0; h < order.size(); ++h) {
    const ScheduleBubble& b = bubble_by_id(problem, order[h]);
    double v = capped_vbar_max(problem, b);
    if (prev != nullptr) v = std::min(v, chain_velocity(*prev, b, prev_vbar));
    if (v < b.vbar_min) {
      sol.feasible = false;
      sol.cost = kInf;
      return sol;
    }
    sol.vbar[h] = v;
    sol.tau[h] = problem.t_s + b.d / v;
    sol.cost += problem.phi(b, v);
    prev = &b;
    prev_vbar = v;
  }
  return sol;
}

void velbound(BnbNode& node, const ScheduleProblem& problem) {
  node.bound_vbar.resize(problem.bubbles.size());
  // Without a committed prefix every bubble sits at its own cap.
  for (std::size_t i = 0; i < problem.bubbles.size(); ++i) {
    node.bound_vbar[i] = capped_vbar_max(problem, problem.bubbles[i]);
  }
  if (node.prefix.empty()) return;
  const ScheduleBubble* last = &bubble_by_id(problem, node.prefix.back());
  double last_vbar = node.prefix_vbar.back();
  for (const auto& queue : node.queues) {
    const ScheduleBubble* prev = last;
    double prev_vbar = last_vbar;
    for (int id : queue) {
      std::size_t idx = index_by_id(problem, id);
      const ScheduleBubble& b = problem.bubbles[idx];
      double v = std::min(capped_vbar_max(problem, b), chain_velocity(*prev, b, prev_vbar));
      node.bound_vbar[idx] = v;
      prev = &b;
      prev_vbar = v;
    }
  }
}

double subtree_lower_bound(const BnbNode& node, const ScheduleProblem& problem) {
  double bound = 0.0;
  std::vector<bool> in_prefix(problem.bubbles.size(), false);
  for (std::size_t h = 0; h < node.prefix.size(); ++h) {
    const ScheduleBubble& b = bubble_by_id(problem, node.prefix[h]);
    bound += problem.phi(b, node.prefix_vbar[h]);
    in_prefix[index_by_id(problem, node.prefix[h])] = true;
  }
  for (std::size_t i = 0; i < problem.bubbles.size(); ++i) {
    if (in_prefix[i]) continue;
    const ScheduleBubble& b = problem.bubbles[i];
    double v = node.bound_vbar.empty() ? capped_vbar_max(problem, b) : node.bound_vbar[i];
    if (v < b.vbar_min) return kInf;  // no completion can satisfy this bubble
    bound += problem.phi(b, v);
  }
  return bound;
}

namespace {

struct SearchState {
  const ScheduleProblem& problem;
  ScheduleSolution best;
  BnbStats stats;
  bool record;
};

// Initial incumbent: merge branch queues by ascending distance.
std::vector<int> fcfs_order(const ScheduleProblem& pr) {
  std::vector<const ScheduleBubble*> sorted;
  for (const auto& b : pr.bubbles) sorted.push_back(&b);
  std::sort(sorted.begin(), sorted.end(), [](const ScheduleBubble* a, const ScheduleBubble* b) {
    if (a->d != b->d) return a->d < b->d;
    if (a->branch != b->branch) return a->branch < b->branch;
    return a->id < b->id;
  });
  std::vector<int> order;
  for (const auto* b : sorted) order.push_back(b->id);
  return order;
}

void dfs(SearchState& st, BnbNode& node) {
  ++st.stats.nodes_visited;
  if (st.record) st.stats.visited.emplace_back(node.prefix, node.lower_bound);

  bool leaf = true;
  for (const auto& q : node.queues) {
    if (!q.empty()) leaf = false;
  }
  if (leaf) {
    ++st.stats.leaves_evaluated;
    double cost = node.lower_bound;  // exact at a leaf: all bubbles committed
    if (cost < st.best.cost) {
      st.best.order = node.prefix;
      st.best.vbar = node.prefix_vbar;
      st.best.cost = cost;
      st.best.feasible = true;
    }
    return;
  }

  std::vector<BnbNode> children;
  for (int k = 0; k < kNumBranches; ++k) {
    if (node.queues[k].empty()) continue;
    int id = node.queues[k].front();
    const ScheduleBubble& b = bubble_by_id(st.problem, id);
    double v = capped_vbar_max(st.problem, b);
    if (!node.prefix.empty()) {
      const ScheduleBubble& prev = bubble_by_id(st.problem, node.prefix.back());
      v = std::min(v, chain_velocity(prev, b, node.prefix_vbar.back()));
    }
    if (v < b.vbar_min) {
      ++st.stats.nodes_pruned;
      continue;  // committing this bubble is already infeasible
    }
    BnbNode child;
    child.prefix = node.prefix;
    child.prefix.push_back(id);
    child.prefix_vbar = node.prefix_vbar;
    child.prefix_vbar.push_back(v);
    child.queues = node.queues;
    child.queues[k].erase(child.queues[k].begin());
    velbound(child, st.problem);
    child.lower_bound = subtree_lower_bound(child, st.problem);
    children.push_back(std::move(child));
  }
  std::sort(children.begin(), children.end(), [](const BnbNode& a, const BnbNode& b) {
    if (a.lower_bound != b.lower_bound) return a.lower_bound < b.lower_bound;
    return a.prefix.back() < b.prefix.back();
  });

  for (BnbNode& child : children) {
    if (child.lower_bound >= st.best.cost) {
      ++st.stats.nodes_pruned;
      continue;
    }
    dfs(st, child);
  }
}

}  // namespace

ScheduleSolution branch_and_bound(const ScheduleProblem& problem, BnbStats* stats, bool record_nodes) {
  if (problem.bubbles.empty()) throw std::invalid_argument("branch_and_bound: empty problem");

  SearchState st{problem, {}, {}, record_nodes};
  st.best = velopt(problem, fcfs_order(problem));

  BnbNode root;
  root.queues = build_queues(problem);
  velbound(root, problem);
  root.lower_bound = subtree_lower_bound(root, problem);
  dfs(st, root);

  if (!st.best.feasible) throw std::runtime_error("branch_and_bound: no feasible order");
  // Recompute taus and cost through velopt for a single authoritative path.
  ScheduleSolution sol = velopt(problem, st.best.order);
  if (stats != nullptr) *stats = std::move(st.stats);
  return sol;
}

std::vector<std::vector<int>> enumerate_orders(const ScheduleProblem& problem,
                                               const std::vector<int>& prefix) {
  auto queues = build_queues(problem);
  for (int id : prefix) {
    bool found = false;
    for (auto& q : queues) {
      if (!q.empty() && q.front() == id) {
        q.erase(q.begin());
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("enumerate_orders: prefix violates branch order");
  }
  std::vector<std::vector<int>> out;
  std::vector<int> current = prefix;
  auto recurse = [&](auto&& self) -> void {
    bool any = false;
    for (auto& q : queues) {
      if (q.empty()) continue;
      any = true;
      int id = q.front();
      q.erase(q.begin());
      current.push_back(id);
      self(self);
      current.pop_back();
      q.insert(q.begin(), id);
    }
    if (!any) out.push_back(current);
  };
  recurse(recurse);
  return out;
}

ScheduleSolution brute_force_schedule(const ScheduleProblem& problem, int max_n) {
  if (static_cast<int>(problem.bubbles.size()) > max_n) {
    throw std::invalid_argument("brute_force_schedule: instance too large for exhaustive search");
  }
  ScheduleSolution best;
  for (const auto& order : enumerate_orders(problem)) {
    ScheduleSolution sol = velopt(problem, order);
    if (sol.feasible && sol.cost < best.cost) best = sol;
  }
  if (!best.feasible) throw std::runtime_error("brute_force_schedule: no feasible order");
  return best;
}

ScheduleProblem parse_schedule_instance(std::istream& in) {
  ScheduleProblem pr;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;  // blank
    ls.clear();
    ls.seekg(0);
    if (!have_header) {
      if (!(ls >> pr.t_s >> pr.tau_min)) {
        throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                 ": expected header 't_s tau_min'");
      }
      have_header = true;
      continue;
    }
    ScheduleBubble b;
    if (!(ls >> b.id >> b.branch >> b.d >> b.vbar_min >> b.vbar_max >> b.tau_occ >> b.size)) {
      throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                               ": expected 'id branch d vbar_min vbar_max tau_occ size'");
    }
    if (b.branch < 1 || b.branch > kNumBranches || b.d <= 0.0 || b.size < 1) {
      throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                               ": value out of range");
    }
    pr.bubbles.push_back(b);
  }
  if (!have_header) throw std::runtime_error("parse error: empty instance");
  return pr;
}

std::string format_schedule_instance(const ScheduleProblem& problem) {
  std::ostringstream os;
  os.precision(17);
  os << problem.t_s << ' ' << problem.tau_min << '\n';
  for (const auto& b : problem.bubbles) {
    os << b.id << ' ' << b.branch << ' ' << b.d << ' ' << b.vbar_min << ' ' << b.vbar_max << ' '
       << b.tau_occ << ' ' << b.size << '\n';
  }
  return os.str();
}

}  // namespace crossflow
