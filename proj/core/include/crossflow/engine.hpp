#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "crossflow/baseline.hpp"
#include "crossflow/params.hpp"
#include "crossflow/scheduler.hpp"
#include "crossflow/types.hpp"

namespace crossflow {

enum class Mode { hd, signal };

struct StopRule {
  enum class Kind { time_limit, car_cap };
  Kind kind = Kind::time_limit;
  double time_limit = 60.0;
  int car_cap = 50;
};

struct SimConfig {
  Params params;
  Mode mode = Mode::hd;
  std::uint64_t seed = 1;
  StopRule stop;
  bool strict = false;        // abort at the first monitor violation
  bool record_trace = false;  // per-step per-vehicle trace lines
  FuelModel fuel;
  double max_sim_time = 3600.0;  // hard ceiling for car-cap runs
};

enum class ViolationKind { safety, schedule, occupancy, mutual_exclusion };

struct Violation {
  ViolationKind kind;
  double time = 0.0;
  int vehicle_id = -1;
  int bubble_id = -1;
  double value = 0.0;
  std::string detail;
};

struct MonitorReport {
  std::vector<Violation> safety;
  std::vector<Violation> schedule;
  std::vector<Violation> occupancy;
  std::vector<Violation> mutual_exclusion;

  std::size_t total() const {
    return safety.size() + schedule.size() + occupancy.size() + mutual_exclusion.size();
  }
  bool empty() const { return total() == 0; }
  void add(Violation v);
};

struct VehicleRecord {
  int id;
  int branch;
  double t_spawn;
  std::optional<double> t_approach;
  std::optional<double> t_exit;
  double cost;
};

struct Metrics {
  long spawned = 0;
  long crossed = 0;
  long cpm = 0;  // vehicles that exited within the first simulated minute
  std::optional<double> tcc;  // time of the car_cap-th exit (car-cap runs)
  double cpc = 0.0;           // mean accumulated cost over crossed vehicles
  double sim_time_end = 0.0;
  std::vector<VehicleRecord> vehicles;
};

struct SimResult {
  Metrics metrics;
  MonitorReport monitors;
  std::vector<std::string> trace;
  bool aborted = false;  // strict mode stop
};

/// Step-level invariant checks shared by the engine and the tests. Keeps
/// per-vehicle dedup state so each (kind, vehicle) pair is reported once.
class Monitors {
 public:
  Monitors(const Params& p, Mode mode) : p_(p), mode_(mode) {}

  /// Safety ratio, crossing speed and exclusive occupancy on a snapshot.
  void check_snapshot(const std::vector<std::vector<VehicleState>>& vehicles_by_branch,
                      const std::unordered_map<int, Bubble>& bubbles, double now,
                      MonitorReport& report);

  /// Approach event of a vehicle (front reached the stop line at time t).
  void on_approach(const VehicleState& v, const Bubble* bubble, bool lead_vehicle, double t,
                   MonitorReport& report);

  /// Exit event (front reached the far side at time t).
  void on_exit(const VehicleState& v, const Bubble* bubble, double t, MonitorReport& report);

  /// Signal-mode approach legality.
  void on_approach_signal(const VehicleState& v, const SignalState& signal, double t,
                          MonitorReport& report);

  /// Deadline-window check at assignment time.
  void on_assignment(const Bubble& bubble, const std::vector<VehicleState>& members, double t_s,
                     MonitorReport& report);

 private:
  bool once(ViolationKind kind, int vehicle_id);

  const Params& p_;
  Mode mode_;
  std::unordered_set<long> reported_;
};

/// Runs one closed-loop simulation: spawning, clustering and scheduling every
/// t_cs, per-branch control and exact integration every dt, monitors every
/// step. Deterministic for a fixed config and seed.
SimResult run_simulation(const SimConfig& cfg);

/// Engine-level config validation (beyond validate_params): t_cs must be an
/// integer multiple of dt, and branch bubble caps must fit the global cap.
std::vector<std::string> validate_sim_config(const SimConfig& cfg);

}  // namespace crossflow
