#include "doctest.h"

#include <stdexcept>

#include <sstream>

#include "crossflow/config.hpp"
#include "crossflow/experiment.hpp"

using namespace crossflow;

TEST_CASE("config text parses and round trips") {
  std::string text =
      "# comment\n"
      "v_max = 16.6666666666\n"
      "mu = 0.2, 0.5, 1.0\n"
      "mode = both\n"
      "seeds = 3\n"
      "stop = cars:50\n"
      "W_T = 0.1,1,10\n";
  auto spec = parse_config_text(text);
  CHECK(spec.params.v_max == doctest::Approx(16.6666666666));
  CHECK(spec.mus == std::vector<double>{0.2, 0.5, 1.0});
  CHECK(spec.modes.size() == 2);
  CHECK(spec.seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(spec.stop.kind == StopRule::Kind::car_cap);
  CHECK(spec.stop.car_cap == 50);
  CHECK(spec.wts.size() == 3);

  auto round = parse_config_text(config_text(spec));
  CHECK(round.params.v_max == spec.params.v_max);
  CHECK(round.mus == spec.mus);
  CHECK(round.seeds == spec.seeds);
}

TEST_CASE("unknown keys and bad values are named in errors") {
  try {
    parse_config_text("no_such_key = 1\n");
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("no_such_key") != std::string::npos);
  }
  try {
    parse_config_text("v_max = fast\n");
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("v_max") != std::string::npos);
  }
}

TEST_CASE("the reference preset carries the comparison override") {
  auto spec = paper_table1_preset();
  REQUIRE(spec.params.t_iat_override);
  CHECK(*spec.params.t_iat_override == 1.58);
  CHECK(spec.seeds.size() == 10);
  CHECK(spec.modes.size() == 2);
  CHECK(spec.params.t_cs == 3.77);
  CHECK(spec.params.max_bubbles == 8);
}

TEST_CASE("trial matrix covers the cartesian product in sorted order") {
  ExperimentSpec spec;
  spec.modes = {Mode::signal, Mode::hd};
  spec.mus = {1.0, 0.5};
  spec.wts = {1.0};
  spec.seeds = {2, 1};
  auto keys = trial_matrix(spec);
  REQUIRE(keys.size() == 8);
  CHECK(keys.front().mode == Mode::hd);
  CHECK(keys.front().mu == 0.5);
  CHECK(keys.front().seed == 1);
  CHECK(keys.back().mode == Mode::signal);
  CHECK(keys.back().mu == 1.0);
  CHECK(keys.back().seed == 2);
}

TEST_CASE("csv has the stable schema, trial rows and one mean row per group") {
  ExperimentSpec spec = paper_table1_preset();
  spec.seeds = {1, 2};
  spec.mus = {0.5};
  spec.stop.kind = StopRule::Kind::time_limit;
  spec.stop.time_limit = 10.0;
  auto results = run_experiment(spec, 2);
  auto csv = results_csv(spec, results);

  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "mode,mu,W_T,seed,stop_mode,CPM,TCC,CPC,crossed,violations");
  int trial_rows = 0, mean_rows = 0;
  while (std::getline(in, line)) {
    if (line.find(",mean,") != std::string::npos) {
      ++mean_rows;
    } else if (!line.empty()) {
      ++trial_rows;
    }
  }
  CHECK(trial_rows == 4);  // 2 modes x 2 seeds
  CHECK(mean_rows == 2);   // one per (mode, mu, W_T)
}

TEST_CASE("aggregate rows are recomputable from trial rows") {
  ExperimentSpec spec;
  spec.modes = {Mode::hd};
  spec.mus = {0.5};
  spec.seeds = {1, 2, 3};
  spec.params.t_iat_override = 1.58;
  spec.stop.time_limit = 15.0;
  auto results = run_experiment(spec, 3);
  auto csv = results_csv(spec, results);

  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  double cpc_sum = 0.0;
  int n = 0;
  double mean_cpc = -1.0;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() >= 9);
    if (cells[3] == "mean") {
      mean_cpc = std::stod(cells[7]);
    } else {
      cpc_sum += std::stod(cells[7]);
      ++n;
    }
  }
  REQUIRE(n == 3);
  CHECK(mean_cpc == doctest::Approx(cpc_sum / n).epsilon(1e-9));
}

TEST_CASE("stop rule parsing") {
  auto t = parse_stop_rule("time:60");
  CHECK(t.kind == StopRule::Kind::time_limit);
  CHECK(t.time_limit == 60.0);
  auto c = parse_stop_rule("cars:50");
  CHECK(c.kind == StopRule::Kind::car_cap);
  CHECK(c.car_cap == 50);
  CHECK_THROWS_AS(parse_stop_rule("laps:3"), std::runtime_error);
}
