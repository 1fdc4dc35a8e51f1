#include "crossflow/config.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <stdexcept>

namespace crossflow {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  auto e = s.find_last_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad numeric value for '" + key + "': " + v);
  }
}

long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad integer value for '" + key + "': " + v);
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::runtime_error("config: bad boolean value for '" + key + "': " + v);
}

}  // namespace

std::string mode_name(Mode m) { return m == Mode::hd ? "hd" : "signal"; }

Mode parse_mode(const std::string& name) {
  if (name == "hd") return Mode::hd;
  if (name == "signal") return Mode::signal;
  throw std::runtime_error("config: unknown mode '" + name + "' (expected hd or signal)");
}

StopRule parse_stop_rule(const std::string& text) {
  StopRule rule;
  auto colon = text.find(':');
  if (colon == std::string::npos) throw std::runtime_error("config: bad stop rule '" + text + "'");
  std::string kind = text.substr(0, colon);
  std::string value = text.substr(colon + 1);
  if (kind == "time") {
    rule.kind = StopRule::Kind::time_limit;
    rule.time_limit = to_double("stop", value);
  } else if (kind == "cars") {
    rule.kind = StopRule::Kind::car_cap;
    rule.car_cap = static_cast<int>(to_long("stop", value));
  } else {
    throw std::runtime_error("config: bad stop rule '" + text + "' (expected time:<s> or cars:<n>)");
  }
  return rule;
}

void apply_override(ExperimentSpec& spec, const std::string& key, const std::string& value) {
  Params& p = spec.params;
  if (key == "L") p.vehicle_length = to_double(key, value);
  else if (key == "Delta") p.intersection_length = to_double(key, value);
  else if (key == "L_s") p.staging_length = to_double(key, value);
  else if (key == "L_m") p.mid_length = to_double(key, value);
  else if (key == "L_e") p.exit_length = to_double(key, value);
  else if (key == "v_max") p.v_max = to_double(key, value);
  else if (key == "u_max") p.u_max = to_double(key, value);
  else if (key == "u_min") p.u_min = to_double(key, value);
  else if (key == "nu_nom") p.nu_nom = to_double(key, value);
  else if (key == "sigma0") p.sigma0 = to_double(key, value);
  else if (key == "T_cs") p.t_cs = to_double(key, value);
  else if (key == "Nbar") p.max_bubbles = static_cast<int>(to_long(key, value));
  else if (key == "Nbar_k") p.max_new_bubbles_branch = static_cast<int>(to_long(key, value));
  else if (key == "W_green") p.green_time = to_double(key, value);
  else if (key == "dt") p.dt = to_double(key, value);
  else if (key == "T_iat_override") {
    if (value == "none" || value.empty()) p.t_iat_override.reset();
    else p.t_iat_override = to_double(key, value);
  }
  else if (key == "f0") spec.fuel.f0 = to_double(key, value);
  else if (key == "f1") spec.fuel.f1 = to_double(key, value);
  else if (key == "W_T") {
    spec.wts.clear();
    for (const auto& v : split_list(value)) spec.wts.push_back(to_double(key, v));
    if (spec.wts.empty()) throw std::runtime_error("config: empty W_T list");
  }
  else if (key == "mu") {
    spec.mus.clear();
    for (const auto& v : split_list(value)) spec.mus.push_back(to_double(key, v));
    if (spec.mus.empty()) throw std::runtime_error("config: empty mu list");
  }
  else if (key == "mode") {
    spec.modes.clear();
    for (const auto& v : split_list(value)) {
      if (v == "both") {
        spec.modes = {Mode::hd, Mode::signal};
        break;
      }
      spec.modes.push_back(parse_mode(v));
    }
    if (spec.modes.empty()) throw std::runtime_error("config: empty mode list");
  }
  else if (key == "seeds") {
    spec.seeds.clear();
    auto items = split_list(value);
    if (items.size() == 1 && items[0].find(':') == std::string::npos &&
        items[0].find('-') == std::string::npos) {
      // A single number N means seeds 1..N.
      long n = to_long(key, items[0]);
      if (n < 1) throw std::runtime_error("config: seeds count must be >= 1");
      for (long s = 1; s <= n; ++s) spec.seeds.push_back(static_cast<std::uint64_t>(s));
    } else {
      for (const auto& v : items) spec.seeds.push_back(static_cast<std::uint64_t>(to_long(key, v)));
    }
    if (spec.seeds.empty()) throw std::runtime_error("config: empty seed list");
  }
  else if (key == "stop") spec.stop = parse_stop_rule(value);
  else if (key == "strict") spec.strict = to_bool(key, value);
  else if (key == "trace") spec.trace = to_bool(key, value);
  else if (key == "out") spec.out_dir = value;
  else throw std::runtime_error("config: unknown key '" + key + "'");
}

ExperimentSpec parse_config_text(const std::string& text) {
  ExperimentSpec spec;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config: line " + std::to_string(line_no) +
                               ": expected 'key = value'");
    }
    apply_override(spec, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return spec;
}

ExperimentSpec paper_table1_preset() {
  ExperimentSpec spec;  // Params defaults already carry the reference table
  spec.params.t_iat_override = 1.58;
  spec.modes = {Mode::hd, Mode::signal};
  spec.mus = {0.5};
  spec.wts = {1.0};
  spec.seeds.clear();
  for (std::uint64_t s = 1; s <= 10; ++s) spec.seeds.push_back(s);
  return spec;
}

std::string config_text(const ExperimentSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  const Params& p = spec.params;
  os << "L = " << p.vehicle_length << "\n";
  os << "Delta = " << p.intersection_length << "\n";
  os << "L_s = " << p.staging_length << "\n";
  os << "L_m = " << p.mid_length << "\n";
  os << "L_e = " << p.exit_length << "\n";
  os << "v_max = " << p.v_max << "\n";
  os << "u_max = " << p.u_max << "\n";
  os << "u_min = " << p.u_min << "\n";
  os << "nu_nom = " << p.nu_nom << "\n";
  os << "sigma0 = " << p.sigma0 << "\n";
  os << "T_cs = " << p.t_cs << "\n";
  os << "Nbar = " << p.max_bubbles << "\n";
  os << "Nbar_k = " << p.max_new_bubbles_branch << "\n";
  os << "W_green = " << p.green_time << "\n";
  os << "dt = " << p.dt << "\n";
  if (p.t_iat_override) os << "T_iat_override = " << *p.t_iat_override << "\n";
  os << "f0 = " << spec.fuel.f0 << "\n";
  os << "f1 = " << spec.fuel.f1 << "\n";
  os << "mode = ";
  for (std::size_t i = 0; i < spec.modes.size(); ++i) {
    os << (i ? "," : "") << mode_name(spec.modes[i]);
  }
  os << "\nmu = ";
  for (std::size_t i = 0; i < spec.mus.size(); ++i) os << (i ? "," : "") << spec.mus[i];
  os << "\nW_T = ";
  for (std::size_t i = 0; i < spec.wts.size(); ++i) os << (i ? "," : "") << spec.wts[i];
  os << "\nseeds = ";
  for (std::size_t i = 0; i < spec.seeds.size(); ++i) os << (i ? "," : "") << spec.seeds[i];
  os << "\nstop = "
     << (spec.stop.kind == StopRule::Kind::time_limit
             ? "time:" + std::to_string(spec.stop.time_limit)
             : "cars:" + std::to_string(spec.stop.car_cap))
     << "\n";
  os << "strict = " << (spec.strict ? "true" : "false") << "\n";
  os << "trace = " << (spec.trace ? "true" : "false") << "\n";
  if (!spec.out_dir.empty()) os << "out = " << spec.out_dir << "\n";
  return os.str();
}

}  // namespace crossflow
