#include "doctest.h"

#include "crossflow/params.hpp"

using namespace crossflow;

TEST_CASE("reference parameter table passes validation") {
  Params p;  // defaults carry the reference table
  CHECK(validate_params(p).empty());
  // Exit-zone requirement evaluates to 34.722 + 29.630.
  CHECK(exit_zone_requirement(p) == doctest::Approx(64.3518518519).epsilon(1e-9));
  // Clustering period bound: 3.77 < 70 / (50/3) = 4.2.
  CHECK(p.t_cs < p.staging_length / p.v_max);
}

TEST_CASE("short exit zone produces exactly one violation") {
  Params p;
  p.exit_length = 50.0;
  auto v = validate_params(p);
  REQUIRE(v.size() == 1);
  CHECK(v.front().find("exit_length") != std::string::npos);
  CHECK(v.front().find("64.35") != std::string::npos);
}

TEST_CASE("clustering period bound is enforced") {
  Params p;
  p.t_cs = 4.5;  // above 4.2
  auto v = validate_params(p);
  REQUIRE(v.size() == 1);
  CHECK(v.front().find("t_cs") != std::string::npos);
}

TEST_CASE("validation is pure") {
  Params p;
  p.sigma0 = 0.9;
  p.u_min = 0.5;
  auto a = validate_params(p);
  auto b = validate_params(p);
  CHECK(a == b);
  CHECK(!a.empty());
}
