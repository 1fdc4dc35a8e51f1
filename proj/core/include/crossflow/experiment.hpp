#pragma once

#include <string>
#include <vector>

#include "crossflow/config.hpp"
#include "crossflow/engine.hpp"

namespace crossflow {

struct TrialKey {
  Mode mode;
  double mu;
  double w_t;
  std::uint64_t seed;
};

struct TrialResult {
  TrialKey key;
  Metrics metrics;
  std::size_t violations = 0;
  bool aborted = false;
  std::vector<std::string> trace;
};

/// All (mode, mu, w_t, seed) cells of a spec, in sorted order.
std::vector<TrialKey> trial_matrix(const ExperimentSpec& spec);

/// Sim config for one cell.
SimConfig trial_config(const ExperimentSpec& spec, const TrialKey& key);

/// Runs every cell, optionally across threads. Results come back in
/// trial_matrix order regardless of scheduling.
std::vector<TrialResult> run_experiment(const ExperimentSpec& spec, int jobs = 1);

/// CSV with the fixed schema
/// mode,mu,W_T,seed,stop_mode,CPM,TCC,CPC,crossed,violations:
/// one row per trial plus one mean row per (mode, mu, W_T) group.
std::string results_csv(const ExperimentSpec& spec, const std::vector<TrialResult>& results);

/// Round-trippable decimal rendering used in CSV and traces.
std::string format_compact(double x);

}  // namespace crossflow
