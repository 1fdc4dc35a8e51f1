#include "crossflow/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <sstream>
#include <thread>

namespace crossflow {

std::string format_compact(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::vector<TrialKey> trial_matrix(const ExperimentSpec& spec) {
  std::vector<TrialKey> keys;
  for (Mode mode : spec.modes) {
    for (double mu : spec.mus) {
      for (double wt : spec.wts) {
        for (std::uint64_t seed : spec.seeds) keys.push_back({mode, mu, wt, seed});
      }
    }
  }
  std::sort(keys.begin(), keys.end(), [](const TrialKey& a, const TrialKey& b) {
    if (a.mode != b.mode) return a.mode < b.mode;
    if (a.mu != b.mu) return a.mu < b.mu;
    if (a.w_t != b.w_t) return a.w_t < b.w_t;
    return a.seed < b.seed;
  });
  return keys;
}

SimConfig trial_config(const ExperimentSpec& spec, const TrialKey& key) {
  SimConfig cfg;
  cfg.params = spec.params;
  cfg.params.mu = key.mu;
  cfg.params.w_t = key.w_t;
  cfg.mode = key.mode;
  cfg.seed = key.seed;
  cfg.stop = spec.stop;
  cfg.strict = spec.strict;
  cfg.record_trace = spec.trace;
  cfg.fuel = spec.fuel;
  return cfg;
}

std::vector<TrialResult> run_experiment(const ExperimentSpec& spec, int jobs) {
  auto keys = trial_matrix(spec);
  std::vector<TrialResult> results(keys.size());

  auto run_one = [&](std::size_t i) {
    SimResult sim = run_simulation(trial_config(spec, keys[i]));
    results[i].key = keys[i];
    results[i].metrics = std::move(sim.metrics);
    results[i].violations = sim.monitors.total();
    results[i].aborted = sim.aborted;
    results[i].trace = std::move(sim.trace);
  };

  if (jobs <= 1 || keys.size() <= 1) {
    for (std::size_t i = 0; i < keys.size(); ++i) run_one(i);
    return results;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= keys.size()) return;
      run_one(i);
    }
  };
  std::vector<std::thread> pool;
  int n = std::min<int>(jobs, static_cast<int>(keys.size()));
  pool.reserve(n);
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return results;
}

namespace {

std::string stop_mode_text(const StopRule& stop) {
  if (stop.kind == StopRule::Kind::time_limit) return "time:" + format_compact(stop.time_limit);
  return "cars:" + std::to_string(stop.car_cap);
}

struct GroupKey {
  Mode mode;
  double mu;
  double w_t;
  bool operator<(const GroupKey& o) const {
    if (mode != o.mode) return mode < o.mode;
    if (mu != o.mu) return mu < o.mu;
    return w_t < o.w_t;
  }
  bool operator==(const GroupKey& o) const {
    return mode == o.mode && mu == o.mu && w_t == o.w_t;
  }
};

}  // namespace

std::string results_csv(const ExperimentSpec& spec, const std::vector<TrialResult>& results) {
  std::ostringstream os;
  os << "mode,mu,W_T,seed,stop_mode,CPM,TCC,CPC,crossed,violations\n";
  std::string stop_text = stop_mode_text(spec.stop);

  auto row_prefix = [&](Mode mode, double mu, double wt) {
    return mode_name(mode) + "," + format_compact(mu) + "," + format_compact(wt) + ",";
  };

  for (const TrialResult& r : results) {
    os << row_prefix(r.key.mode, r.key.mu, r.key.w_t) << r.key.seed << ',' << stop_text << ','
       << r.metrics.cpm << ',' << (r.metrics.tcc ? format_compact(*r.metrics.tcc) : "") << ','
       << format_compact(r.metrics.cpc) << ',' << r.metrics.crossed << ',' << r.violations << '\n';
  }

  // One mean row per (mode, mu, W_T) group; every column recomputable from
  // the trial rows above.
  std::vector<GroupKey> groups;
  for (const TrialResult& r : results) {
    GroupKey g{r.key.mode, r.key.mu, r.key.w_t};
    if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
  }
  std::sort(groups.begin(), groups.end());
  for (const GroupKey& g : groups) {
    double cpm = 0, cpc = 0, crossed = 0, violations = 0, tcc = 0;
    int n = 0, n_tcc = 0;
    for (const TrialResult& r : results) {
      if (!(GroupKey{r.key.mode, r.key.mu, r.key.w_t} == g)) continue;
      ++n;
      cpm += double(r.metrics.cpm);
      cpc += r.metrics.cpc;
      crossed += double(r.metrics.crossed);
      violations += double(r.violations);
      if (r.metrics.tcc) {
        tcc += *r.metrics.tcc;
        ++n_tcc;
      }
    }
    if (n == 0) continue;
    os << row_prefix(g.mode, g.mu, g.w_t) << "mean," << stop_text << ','
       << format_compact(cpm / n) << ',' << (n_tcc > 0 ? format_compact(tcc / n_tcc) : "") << ','
       << format_compact(cpc / n) << ',' << format_compact(crossed / n) << ','
       << format_compact(violations / n) << '\n';
  }
  return os.str();
}

}  // namespace crossflow
