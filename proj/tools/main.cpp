#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "crossflow/config.hpp"
#include "crossflow/experiment.hpp"
#include "crossflow/kinematics.hpp"
#include "crossflow/scheduler.hpp"

namespace fs = std::filesystem;
using namespace crossflow;

namespace {

ExperimentSpec load_spec(const std::string& config) {
  if (config.empty()) return ExperimentSpec{};
  if (config == "paper-table1") return paper_table1_preset();
  std::ifstream in(config);
  if (!in) throw std::runtime_error("cannot open config file: " + config);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string trace_file_name(const TrialKey& key) {
  std::ostringstream os;
  os << "trace_" << mode_name(key.mode) << "_mu" << key.mu << "_wt" << key.w_t << "_seed"
     << key.seed << ".txt";
  return os.str();
}

int cmd_run(const std::string& config, const std::vector<std::string>& overrides, int jobs) {
  ExperimentSpec spec = load_spec(config);
  for (const std::string& ov : overrides) {
    auto eq = ov.find('=');
    if (eq == std::string::npos) throw std::runtime_error("override must be key=value: " + ov);
    apply_override(spec, ov.substr(0, eq), ov.substr(eq + 1));
  }

  auto violations = validate_params(spec.params);
  if (!violations.empty()) {
    std::cerr << "refusing to run, invalid parameters:\n";
    for (const auto& v : violations) std::cerr << "  " << v << "\n";
    return 2;
  }
  {
    SimConfig probe = trial_config(spec, trial_matrix(spec).front());
    auto cfg_errors = validate_sim_config(probe);
    if (!cfg_errors.empty()) {
      std::cerr << "refusing to run, invalid configuration:\n";
      for (const auto& v : cfg_errors) std::cerr << "  " << v << "\n";
      return 2;
    }
  }

  auto results = run_experiment(spec, jobs);
  std::string csv = results_csv(spec, results);

  if (!spec.out_dir.empty()) {
    fs::create_directories(spec.out_dir);
    std::ofstream out(fs::path(spec.out_dir) / "results.csv");
    out << csv;
    if (spec.trace) {
      for (const auto& r : results) {
        std::ofstream tf(fs::path(spec.out_dir) / trace_file_name(r.key));
        for (const auto& line : r.trace) tf << line << '\n';
      }
    }
    std::cout << "wrote " << (fs::path(spec.out_dir) / "results.csv").string() << "\n";
  } else {
    std::cout << csv;
  }

  std::size_t total_violations = 0;
  for (const auto& r : results) total_violations += r.violations;
  if (total_violations > 0) {
    std::cerr << "monitor violations: " << total_violations << "\n";
    if (spec.strict) return 1;
  }
  return 0;
}

int cmd_verify_schedule(const std::string& instance_file) {
  std::ifstream in(instance_file);
  if (!in) {
    std::cerr << "cannot open instance file: " << instance_file << "\n";
    return 2;
  }
  ScheduleProblem problem = parse_schedule_instance(in);
  if (problem.bubbles.size() > 8) {
    std::cerr << "refusing: instance has " << problem.bubbles.size()
              << " bubbles, exhaustive verification is limited to 8\n";
    return 2;
  }

  BnbStats stats;
  ScheduleSolution bb = branch_and_bound(problem, &stats);
  ScheduleSolution oracle = brute_force_schedule(problem);

  auto print_solution = [](const char* name, const ScheduleSolution& s) {
    std::cout << name << ": cost " << format_compact(s.cost) << ", order";
    for (std::size_t i = 0; i < s.order.size(); ++i) {
      std::cout << ' ' << s.order[i] << "(vbar " << format_compact(s.vbar[i]) << ", tau "
                << format_compact(s.tau[i]) << ")";
    }
    std::cout << "\n";
  };
  print_solution("branch-and-bound", bb);
  print_solution("brute-force     ", oracle);
  std::cout << "nodes visited " << stats.nodes_visited << ", pruned " << stats.nodes_pruned
            << ", leaves " << stats.leaves_evaluated << "\n";

  double rel = std::abs(bb.cost - oracle.cost) / std::max(1.0, std::abs(oracle.cost));
  bool match = rel <= 1e-9;
  std::cout << "verdict: " << (match ? "match" : "MISMATCH") << " (relative cost gap "
            << format_compact(rel) << ")\n";
  return match ? 0 : 1;
}

int cmd_print_params(const std::string& config, const std::vector<std::string>& overrides) {
  ExperimentSpec spec = load_spec(config);
  for (const std::string& ov : overrides) {
    auto eq = ov.find('=');
    if (eq == std::string::npos) throw std::runtime_error("override must be key=value: " + ov);
    apply_override(spec, ov.substr(0, eq), ov.substr(eq + 1));
  }
  std::cout << config_text(spec);

  const Params& p = spec.params;
  auto nq = nominal_quantities(p);
  std::cout << "\n# derived quantities\n";
  std::cout << "# d_nom = " << format_compact(nq.d_nom) << " m\n";
  std::cout << "# t_nom = " << format_compact(nq.t_nom) << " s\n";
  Params formula = p;
  formula.t_iat_override.reset();
  std::cout << "# t_iat (formula) = " << format_compact(inter_approach_bound(formula)) << " s\n";
  std::cout << "# t_iat (effective) = " << format_compact(inter_approach_bound(p)) << " s\n";
  std::cout << "# exit zone requirement = " << format_compact(exit_zone_requirement(p))
            << " m (configured " << format_compact(p.exit_length) << " m)\n";
  auto violations = validate_params(p);
  if (violations.empty()) {
    std::cout << "# parameters valid\n";
  } else {
    for (const auto& v : violations) std::cout << "# VIOLATION: " << v << "\n";
  }
  return violations.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crossflow: intersection coordination simulator and scheduler"};
  app.require_subcommand(1);

  std::string config;
  std::vector<std::string> overrides;
  std::string mode, mu, wt, seeds, stop, out;
  bool trace = false, strict = false;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());

  auto* run = app.add_subcommand("run", "run simulation trials and write CSV results");
  run->add_option("--config", config, "config file path or preset name (paper-table1)");
  run->add_option("--set", overrides, "key=value override, repeatable");
  run->add_option("--mode", mode, "hd, signal, both or a comma list");
  run->add_option("--mu", mu, "traffic density values, comma list");
  run->add_option("--wt", wt, "travel-time weights, comma list");
  run->add_option("--seeds", seeds, "seed list, or a count meaning 1..N");
  run->add_option("--stop", stop, "time:<seconds> or cars:<count>");
  run->add_option("--out", out, "output directory for results.csv and traces");
  run->add_flag("--trace", trace, "record per-step vehicle traces");
  run->add_flag("--strict", strict, "abort a trial on the first monitor violation");
  run->add_option("--jobs", jobs, "parallel trials");

  std::string instance_file;
  auto* verify = app.add_subcommand("verify-schedule",
                                    "check branch-and-bound against brute force on an instance");
  verify->add_option("instance", instance_file, "instance file")->required();

  auto* pp = app.add_subcommand("print-params", "print resolved parameters and derived quantities");
  pp->add_option("--config", config, "config file path or preset name");
  pp->add_option("--set", overrides, "key=value override, repeatable");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (!mode.empty()) overrides.push_back("mode=" + mode);
      if (!mu.empty()) overrides.push_back("mu=" + mu);
      if (!wt.empty()) overrides.push_back("W_T=" + wt);
      if (!seeds.empty()) overrides.push_back("seeds=" + seeds);
      if (!stop.empty()) overrides.push_back("stop=" + stop);
      if (!out.empty()) overrides.push_back("out=" + out);
      if (trace) overrides.push_back("trace=true");
      if (strict) overrides.push_back("strict=true");
      return cmd_run(config, overrides, jobs);
    }
    if (verify->parsed()) return cmd_verify_schedule(instance_file);
    if (pp->parsed()) return cmd_print_params(config, overrides);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
