#include "crossflow/engine.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "crossflow/clustering.hpp"
#include "crossflow/control.hpp"
#include "crossflow/kinematics.hpp"
#include "crossflow/trafficgen.hpp"

namespace crossflow {

namespace {

constexpr double kSigmaTol = 1e-6;
constexpr double kSpeedTol = 1e-6;

std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace

void MonitorReport::add(Violation v) {
  switch (v.kind) {
    case ViolationKind::safety: safety.push_back(std::move(v)); break;
    case ViolationKind::schedule: schedule.push_back(std::move(v)); break;
    case ViolationKind::occupancy: occupancy.push_back(std::move(v)); break;
    case ViolationKind::mutual_exclusion: mutual_exclusion.push_back(std::move(v)); break;
  }
}

bool Monitors::once(ViolationKind kind, int vehicle_id) {
  long key = static_cast<long>(kind) * 1000000L + vehicle_id;
  return reported_.insert(key).second;
}

void Monitors::check_snapshot(const std::vector<std::vector<VehicleState>>& vehicles_by_branch,
                              const std::unordered_map<int, Bubble>& bubbles, double now,
                              MonitorReport& report) {
  // Inter-vehicle safety on every consecutive pair of each branch.
  for (const auto& branch : vehicles_by_branch) {
    for (std::size_t j = 1; j < branch.size(); ++j) {
      const VehicleState& lead = branch[j - 1];
      const VehicleState& fol = branch[j];
      double sigma = safety_ratio({lead.pos - fol.pos, lead.vel, fol.vel}, p_);
      if (sigma < 1.0 - kSigmaTol && once(ViolationKind::safety, fol.id)) {
        report.add({ViolationKind::safety, now, fol.id, fol.bubble_id.value_or(-1), sigma,
                    "safety ratio below 1"});
      }
    }
  }

  // Crossing speed and exclusive use of the crossing region. The occupant
  // key is the bubble in hd mode and the branch in signal mode.
  bool region_claimed = false;
  int occupant = -1;
  for (const auto& branch : vehicles_by_branch) {
    for (const VehicleState& v : branch) {
      if (v.pos < 0.0 || v.pos >= p_.crossing_end()) continue;
      if (mode_ == Mode::hd && v.vel < p_.nu_nom - kSpeedTol && once(ViolationKind::schedule, v.id)) {
        report.add({ViolationKind::schedule, now, v.id, v.bubble_id.value_or(-1), v.vel,
                    "crossing speed below nominal"});
      }
      int owner = mode_ == Mode::hd ? v.bubble_id.value_or(-1) : v.branch;
      if (!region_claimed) {
        region_claimed = true;
        occupant = owner;
      } else if (owner != occupant && once(ViolationKind::mutual_exclusion, v.id)) {
        report.add({ViolationKind::mutual_exclusion, now, v.id, v.bubble_id.value_or(-1),
                    double(owner), "two parties inside the crossing"});
      }
    }
  }
  (void)bubbles;
}

void Monitors::on_approach(const VehicleState& v, const Bubble* bubble, bool lead_vehicle, double t,
                           MonitorReport& report) {
  if (bubble == nullptr || !bubble->tau) {
    report.add({ViolationKind::schedule, t, v.id, -1, 0.0, "approach without an assigned schedule"});
    return;
  }
  double tol = 2.0 * p_.dt;
  double tau = *bubble->tau;
  if (lead_vehicle && std::abs(t - tau) > tol) {
    report.add({ViolationKind::schedule, t, v.id, bubble->id, t - tau,
                "lead vehicle approach off schedule"});
  }
  if (t < tau - tol || t > tau + bubble->tau_occ_bar + tol) {
    report.add({ViolationKind::occupancy, t, v.id, bubble->id, t - tau,
                "approach outside the occupancy window"});
  }
}

void Monitors::on_exit(const VehicleState& v, const Bubble* bubble, double t, MonitorReport& report) {
  if (bubble == nullptr || !bubble->tau) return;
  double tol = 2.0 * p_.dt;
  if (t > *bubble->tau + bubble->tau_occ_bar + tol) {
    report.add({ViolationKind::occupancy, t, v.id, bubble->id, t - *bubble->tau,
                "exit outside the occupancy window"});
  }
}

void Monitors::on_approach_signal(const VehicleState& v, const SignalState& signal, double t,
                                  MonitorReport& report) {
  if (v.branch != signal.active_branch) {
    report.add({ViolationKind::mutual_exclusion, t, v.id, -1, double(v.branch),
                "approach without right of way"});
  } else if (signal.phase == SignalPhase::yellow && !signal.committed.count(v.id)) {
    report.add({ViolationKind::mutual_exclusion, t, v.id, -1, double(v.branch),
                "stoppable vehicle crossed on yellow"});
  }
}

void Monitors::on_assignment(const Bubble& bubble, const std::vector<VehicleState>& members,
                             double t_s, MonitorReport& report) {
  if (!bubble.tau) return;
  double t_nom = nominal_quantities(p_).t_nom;
  for (std::size_t j = 0; j < members.size(); ++j) {
    double deadline = *bubble.tau + double(j) * t_nom;
    double earliest = t_s + earliest_vehicle_approach(members[j].pos, members[j].vel, p_);
    double latest_dur = latest_vehicle_approach(members[j].pos, members[j].vel, p_);
    double latest = latest_dur == kInf ? kInf : t_s + latest_dur;
    if (deadline < earliest - 1e-6 || deadline > latest + 1e-6) {
      report.add({ViolationKind::schedule, t_s, members[j].id, bubble.id, deadline,
                  "deadline outside the vehicle's reachable window"});
    }
  }
}

std::vector<std::string> validate_sim_config(const SimConfig& cfg) {
  std::vector<std::string> out = validate_params(cfg.params);
  const Params& p = cfg.params;
  double steps = p.t_cs / p.dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 || std::round(steps) < 1.0) {
    out.push_back("t_cs must be a positive integer multiple of dt");
  }
  if (kNumBranches * p.max_new_bubbles_branch > p.max_bubbles) {
    out.push_back("4 * max_new_bubbles_branch must not exceed max_bubbles");
  }
  if (cfg.stop.kind == StopRule::Kind::time_limit && cfg.stop.time_limit <= 0.0) {
    out.push_back("stop time limit must be positive");
  }
  if (cfg.stop.kind == StopRule::Kind::car_cap && cfg.stop.car_cap < 1) {
    out.push_back("car cap must be at least 1");
  }
  return out;
}

namespace {

class Simulation {
 public:
  explicit Simulation(const SimConfig& cfg)
      : cfg_(cfg), p_(cfg_.params), monitors_(p_, cfg.mode), branches_(kNumBranches) {
    for (int k = 0; k < kNumBranches; ++k) streams_.emplace_back(cfg.seed, k + 1);
    t_nom_ = nominal_quantities(p_).t_nom;
    t_iat_ = inter_approach_bound(p_);
  }

  SimResult run() {
    auto violations = validate_sim_config(cfg_);
    if (!violations.empty()) {
      throw std::invalid_argument("run_simulation: invalid config: " + violations.front());
    }
    const long steps_per_cs = std::lround(p_.t_cs / p_.dt);

    long step = 0;
    while (true) {
      double t = double(step) * p_.dt;
      if (cfg_.stop.kind == StopRule::Kind::time_limit && t >= cfg_.stop.time_limit - 1e-9) break;
      if (cfg_.stop.kind == StopRule::Kind::car_cap &&
          (metrics_.crossed >= cfg_.stop.car_cap || t >= cfg_.max_sim_time)) {
        break;
      }

      if (step % steps_per_cs == 0) instance(t);
      if (cfg_.mode == Mode::signal) signal_ = signal_step(signal_, branches_, t, p_);

      control_and_integrate(t);
      monitors_.check_snapshot(branches_, bubbles_, t + p_.dt, result_.monitors);
      retire_bubbles();

      assert(metrics_.spawned ==
             metrics_.crossed + long(branches_[0].size() + branches_[1].size() +
                                     branches_[2].size() + branches_[3].size()));

      metrics_.sim_time_end = t + p_.dt;
      ++step;
      if (cfg_.strict && !result_.monitors.empty()) {
        result_.aborted = true;
        break;
      }
    }

    finalize();
    return std::move(result_);
  }

 private:
  void instance(double t_s) {
    // Spawn first, then cluster and schedule on the post-spawn snapshot.
    for (int k = 0; k < kNumBranches; ++k) {
      auto wave = spawn_wave(branches_[k], k + 1, t_s, streams_[k], next_vehicle_id_, p_);
      metrics_.spawned += long(wave.size());
      for (auto& v : wave) branches_[k].push_back(std::move(v));
    }
    if (cfg_.mode != Mode::hd) return;

    ClusterInstanceInput cin{t_s, schedule_list_, tau_min_};
    ClusterInstanceOutput cout =
        cluster_and_select(cin, branches_, bubbles_, next_bubble_id_, p_);
    for (Bubble& b : cout.new_bubbles) {
      for (int vid : b.members) find_vehicle(vid)->bubble_id = b.id;
      bubbles_.emplace(b.id, std::move(b));
    }
    schedule_list_ = cout.list;
    tau_min_ = cout.tau_min;
    if (schedule_list_.empty()) return;

    // Refresh bubble snapshots and build the scheduling problem.
    ScheduleProblem problem;
    problem.t_s = t_s;
    problem.tau_min = tau_min_;
    problem.fuel = cfg_.fuel;
    problem.w_t = p_.w_t;
    problem.v_max = p_.v_max;
    for (int id : schedule_list_) {
      Bubble& b = bubbles_.at(id);
      std::vector<VehicleState> members;
      for (int vid : b.members) members.push_back(*find_vehicle(vid));
      b.lead_pos = members.front().pos;
      b.lead_vel = members.front().vel;
      b.tau_occ_bar = occupancy_bound(b.size(), t_iat_, p_);
      VelocityWindow w = bubble_velocity_window(members, t_s, tau_min_, p_);
      b.tau_e = w.tau_e;
      b.tau_l = w.tau_l;
      b.vbar_min = w.vbar_min;
      b.vbar_max = w.vbar_max;
      problem.bubbles.push_back({b.id, b.branch, -b.lead_pos, b.vbar_min, b.vbar_max,
                                 b.tau_occ_bar, b.size()});
    }

    ScheduleSolution sol = branch_and_bound(problem);
    // Keep the list in schedule order: the overflow rule must drop the
    // bubbles with the earliest windows, and tau_min then ratchets past a
    // prefix of the packed schedule instead of punching holes in it.
    schedule_list_ = sol.order;
    for (std::size_t h = 0; h < sol.order.size(); ++h) {
      Bubble& b = bubbles_.at(sol.order[h]);
      b.tau = sol.tau[h];
      b.scheduled_at = t_s;
      std::vector<VehicleState> members;
      for (std::size_t j = 0; j < b.members.size(); ++j) {
        VehicleState* v = find_vehicle(b.members[j]);
        v->deadline = *b.tau + double(j) * t_nom_;
        members.push_back(*v);
      }
      monitors_.on_assignment(b, members, t_s, result_.monitors);
    }
  }

  void control_and_integrate(double t) {
    for (int k = 0; k < kNumBranches; ++k) {
      auto& branch = branches_[k];
      std::vector<double> decided(branch.size(), 0.0);
      std::vector<bool> coupled(branch.size(), false);

      for (std::size_t i = 0; i < branch.size(); ++i) {
        VehicleState lead;
        ControlDecision dec;
        if (cfg_.mode == Mode::hd) {
          lead = i == 0 ? sentinel_leader(p_) : branch[i - 1];
          if (i > 0) lead.accel = decided[i - 1];
          dec = decide_control(branch[i], lead, t, p_);
        } else {
          lead = baseline_leader(branch, i, signal_, p_);
          if (lead.id >= 0 && i > 0) lead.accel = decided[i - 1];
          dec = baseline_decide_control(branch[i], lead, p_);
        }
        decided[i] = dec.u;
        coupled[i] = dec.coupled;
        if (cfg_.record_trace) trace_line(t, branch[i], dec);
      }

      for (std::size_t i = 0; i < branch.size(); ++i) {
        VehicleState& v = branch[i];
        double x0 = v.pos;
        Motion m = integrate_motion(v.vel, decided[i], p_.dt, p_);
        VehicleState next = step_integrate(v, decided[i], p_.dt, p_);

        if (x0 < 0.0 && next.pos >= 0.0) {
          double tc = motion_crossing_time(m, v.vel, x0, 0.0, p_.dt);
          next.t_approach = t + std::max(0.0, tc);
          const Bubble* b = next.bubble_id ? &bubbles_.at(*next.bubble_id) : nullptr;
          if (cfg_.mode == Mode::hd) {
            bool is_lead = b != nullptr && !b->members.empty() && b->members.front() == next.id;
            monitors_.on_approach(next, b, is_lead, *next.t_approach, result_.monitors);
          } else {
            monitors_.on_approach_signal(next, signal_, *next.t_approach, result_.monitors);
          }
        }
        if (next.pos >= p_.crossing_end() && !next.t_exit) {
          double tc = motion_crossing_time(m, v.vel, x0, p_.crossing_end(), p_.dt);
          double t_exit = t + (tc >= 0.0 ? tc : p_.dt);
          next.t_exit = t_exit;
          // Cost accrues only until the vehicle leaves the domain.
          next.cost_accum -= motion_cost(m, p_.w_t, p_.dt) - motion_cost(m, p_.w_t, t_exit - t);
          if (cfg_.mode == Mode::hd && next.bubble_id) {
            monitors_.on_exit(next, &bubbles_.at(*next.bubble_id), t_exit, result_.monitors);
          }
        }
        v = next;
      }

      // Retire vehicles that left the domain, front first.
      while (!branch.empty() && branch.front().t_exit) {
        const VehicleState& v = branch.front();
        metrics_.crossed += 1;
        exit_times_.push_back(*v.t_exit);
        if (*v.t_exit <= 60.0 + 1e-9) metrics_.cpm += 1;
        crossed_cost_sum_ += v.cost_accum;
        metrics_.vehicles.push_back({v.id, v.branch, v.t_spawn, v.t_approach, v.t_exit, v.cost_accum});
        branch.erase(branch.begin());
      }
    }
  }

  void retire_bubbles() {
    for (auto it = bubbles_.begin(); it != bubbles_.end();) {
      bool any_alive = false;
      for (int vid : it->second.members) {
        if (find_vehicle(vid) != nullptr) any_alive = true;
      }
      if (!any_alive &&
          std::find(schedule_list_.begin(), schedule_list_.end(), it->first) == schedule_list_.end()) {
        it = bubbles_.erase(it);
      } else {
        ++it;
      }
    }
  }

  void finalize() {
    if (metrics_.crossed > 0) {
      metrics_.cpc = crossed_cost_sum_ / double(metrics_.crossed);
      if (cfg_.stop.kind == StopRule::Kind::car_cap && metrics_.crossed >= cfg_.stop.car_cap) {
        std::sort(exit_times_.begin(), exit_times_.end());
        metrics_.tcc = exit_times_[cfg_.stop.car_cap - 1];
      }
    }
    for (const auto& branch : branches_) {
      for (const VehicleState& v : branch) {
        metrics_.vehicles.push_back({v.id, v.branch, v.t_spawn, v.t_approach, v.t_exit, v.cost_accum});
      }
    }
    result_.metrics = std::move(metrics_);
  }

  void trace_line(double t, const VehicleState& v, const ControlDecision& dec) {
    std::string line;
    line.reserve(96);
    line += format_double(t);
    line += ' ';
    line += std::to_string(v.id);
    line += ' ';
    line += std::to_string(v.branch);
    line += ' ';
    line += format_double(v.pos);
    line += ' ';
    line += format_double(v.vel);
    line += ' ';
    line += format_double(dec.u);
    line += ' ';
    line += std::to_string(v.bubble_id.value_or(-1));
    line += ' ';
    line += dec.coupled ? "coupled" : "uncoupled";
    result_.trace.push_back(std::move(line));
  }

  VehicleState* find_vehicle(int id) {
    for (auto& branch : branches_) {
      for (auto& v : branch) {
        if (v.id == id) return &v;
      }
    }
    return nullptr;
  }

  SimConfig cfg_;
  const Params& p_;
  Monitors monitors_;
  std::vector<std::vector<VehicleState>> branches_;
  std::vector<SpawnStream> streams_;
  std::unordered_map<int, Bubble> bubbles_;
  std::vector<int> schedule_list_;
  double tau_min_ = 0.0;
  SignalState signal_;
  double t_nom_ = 0.0;
  double t_iat_ = 0.0;
  int next_vehicle_id_ = 0;
  int next_bubble_id_ = 0;
  Metrics metrics_;
  std::vector<double> exit_times_;
  double crossed_cost_sum_ = 0.0;
  SimResult result_;
};

}  // namespace

SimResult run_simulation(const SimConfig& cfg) {
  Simulation sim(cfg);
  return sim.run();
}

}  // namespace crossflow
