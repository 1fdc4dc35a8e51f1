#pragma once

#include <map>
#include <string>
#include <vector>

#include "crossflow/engine.hpp"

namespace crossflow {

/// Experiment description: the cartesian product of modes, densities, cost
/// weights and seeds, each cell run once.
struct ExperimentSpec {
  Params params;
  FuelModel fuel;
  std::vector<Mode> modes = {Mode::hd};
  std::vector<double> mus = {0.5};
  std::vector<double> wts = {1.0};
  std::vector<std::uint64_t> seeds = {1};
  StopRule stop;
  bool strict = false;
  bool trace = false;
  std::string out_dir;
};

/// Flat key-value configuration text: one "key = value" per line, '#'
/// comments. Keys mirror the parameter names (see default_config_text()).
/// Unknown keys are errors naming the key.
ExperimentSpec parse_config_text(const std::string& text);

/// The built-in preset encoding the reference parameter table, with the
/// 1.58 s inter-approach override used for comparison runs.
ExperimentSpec paper_table1_preset();

/// Serialized form of a spec in the config-file syntax.
std::string config_text(const ExperimentSpec& spec);

/// Applies one "key=value" override (CLI flags) onto a spec.
void apply_override(ExperimentSpec& spec, const std::string& key, const std::string& value);

/// Parses "time:<seconds>" or "cars:<count>".
StopRule parse_stop_rule(const std::string& text);

std::string mode_name(Mode m);
Mode parse_mode(const std::string& name);

}  // namespace crossflow
