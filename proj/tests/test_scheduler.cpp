#include "doctest.h"

#include <stdexcept>

#include <random>
#include <sstream>

#include "crossflow/kinematics.hpp"
#include "crossflow/scheduler.hpp"
#include "oracles.hpp"

using namespace crossflow;

namespace {
const Params kP;

ScheduleProblem two_bubble_chain() {
  // Same branch: d 100 then 150, caps 15 and 14, occupancy 5.
  ScheduleProblem pr;
  pr.bubbles.push_back({1, 1, 100.0, 0.0, 15.0, 5.0, 1});
  pr.bubbles.push_back({2, 1, 150.0, 0.0, 14.0, 5.0, 1});
  return pr;
}

}  // namespace

TEST_CASE("occupancy bound") {
  CHECK(occupancy_bound(1, 1.58, kP) == doctest::Approx(1.58));
  CHECK(occupancy_bound(5, 1.58, kP) == doctest::Approx(7.90));
  CHECK(occupancy_bound(1, 1.0, kP) == doctest::Approx(1.2));  // crossing term wins
}

TEST_CASE("inter-approach bound") {
  // Reference table, no override: the follower-recovery term dominates.
  CHECK(inter_approach_bound(kP) == doctest::Approx(4.62425730994152).epsilon(1e-9));

  Params with_override = kP;
  with_override.t_iat_override = 1.58;
  CHECK(inter_approach_bound(with_override) == 1.58);

  // Slow nominal speed puts the worst-case follower speed above it.
  Params easy = kP;
  easy.nu_nom = 3.0;
  double t_nom = nominal_quantities(easy).t_nom;
  CHECK(inter_approach_bound(easy) == doctest::Approx(easy.sigma0 * t_nom));
}

TEST_CASE("bubble velocity window combines member kinematics") {
  double t_nom = nominal_quantities(kP).t_nom;
  VehicleState lead, tail;
  lead.pos = -100.0;
  lead.vel = 10.0;
  tail.pos = -130.0;
  tail.vel = 5.0;
  auto w = bubble_velocity_window({lead, tail}, 0.0, 0.0, kP);
  double e_lead = earliest_vehicle_approach(lead.pos, lead.vel, kP);
  double e_tail = earliest_vehicle_approach(tail.pos, tail.vel, kP);
  CHECK(w.tau_e == doctest::Approx(std::max(e_lead, e_tail - t_nom)));
  CHECK(w.vbar_max == doctest::Approx(100.0 / std::max(e_lead, e_tail - t_nom)));
  CHECK(w.tau_l == kInf);     // both can stop before the line
  CHECK(w.vbar_min == 0.0);
}

TEST_CASE("velocity window respects tau_min") {
  VehicleState lead;
  lead.pos = -100.0;
  lead.vel = 10.0;
  auto free_w = bubble_velocity_window({lead}, 0.0, 0.0, kP);
  auto capped = bubble_velocity_window({lead}, 0.0, 20.0, kP);
  CHECK(capped.vbar_max == doctest::Approx(100.0 / 20.0));
  CHECK(capped.vbar_max < free_w.vbar_max);
}

TEST_CASE("coupling coefficients") {
  auto c = coupling_coeffs(100.0, 150.0, 5.0);
  CHECK(c.c == doctest::Approx(2.0 / 3.0));
  CHECK(c.b == doctest::Approx(1.0 / 30.0));
  CHECK(coupling_coeffs(100.0, 100.0, 5.0).c == doctest::Approx(1.0));
  CHECK(coupling_coeffs(100.0, 150.0, 0.0).b == 0.0);
}

TEST_CASE("velopt chains the predecessor constraint") {
  auto pr = two_bubble_chain();
  auto sol = velopt(pr, {1, 2});
  REQUIRE(sol.feasible);
  CHECK(sol.vbar[0] == doctest::Approx(15.0));
  CHECK(sol.vbar[1] == doctest::Approx(90.0 / 7.0).epsilon(1e-12));
  // The chain makes the second approach exactly one occupancy later.
  CHECK(sol.tau[1] - sol.tau[0] == doctest::Approx(5.0).epsilon(1e-9));

  // Third bubble keeps chaining.
  pr.bubbles.push_back({3, 2, 200.0, 0.0, 16.0, 5.0, 1});
  auto sol3 = velopt(pr, {1, 2, 3});
  REQUIRE(sol3.feasible);
  CHECK(sol3.vbar[2] == doctest::Approx(12.0).epsilon(1e-9));
  CHECK(sol3.tau[2] == doctest::Approx(sol3.tau[1] + 5.0).epsilon(1e-9));
}

TEST_CASE("velopt on a single bubble takes the cap") {
  ScheduleProblem pr;
  pr.bubbles.push_back({7, 2, 120.0, 0.0, 14.0, 3.0, 2});
  auto sol = velopt(pr, {7});
  REQUIRE(sol.feasible);
  CHECK(sol.vbar[0] == doctest::Approx(14.0));
  CHECK(sol.cost == doctest::Approx(pr.phi(pr.bubbles[0], 14.0)));
}

TEST_CASE("velopt flags infeasible orders") {
  auto pr = two_bubble_chain();
  pr.bubbles[1].vbar_min = 13.5;  // chain forces 12.857 < 13.5
  auto sol = velopt(pr, {1, 2});
  CHECK(!sol.feasible);
  CHECK(sol.cost == kInf);
}

TEST_CASE("velbound chains bounds through residual queues") {
  ScheduleProblem pr;
  pr.bubbles.push_back({0, 1, 100.0, 0.0, 15.0, 5.0, 1});
  pr.bubbles.push_back({1, 2, 150.0, 0.0, 14.0, 5.0, 1});
  pr.bubbles.push_back({2, 2, 200.0, 0.0, 16.0, 5.0, 1});

  BnbNode node;
  node.prefix = {0};
  node.prefix_vbar = {15.0};
  node.queues.assign(kNumBranches, {});
  node.queues[1] = {1, 2};
  velbound(node, pr);
  CHECK(node.bound_vbar[1] == doctest::Approx(90.0 / 7.0).epsilon(1e-12));
  CHECK(node.bound_vbar[2] == doctest::Approx(12.0).epsilon(1e-9));

  // A generous chain leaves the cap binding.
  BnbNode cap_node;
  cap_node.prefix = {0};
  cap_node.prefix_vbar = {15.0};
  cap_node.queues.assign(kNumBranches, {});
  ScheduleProblem pr2;
  pr2.bubbles.push_back({0, 1, 100.0, 0.0, 15.0, 0.1, 1});
  pr2.bubbles.push_back({1, 2, 1000.0, 0.0, 10.0, 5.0, 1});
  cap_node.queues[1] = {1};
  velbound(cap_node, pr2);
  CHECK(cap_node.bound_vbar[1] == doctest::Approx(10.0));

  // Empty queues are a no-op.
  BnbNode empty_node;
  empty_node.prefix = {0};
  empty_node.prefix_vbar = {15.0};
  empty_node.queues.assign(kNumBranches, {});
  velbound(empty_node, pr2);
  CHECK(empty_node.bound_vbar[0] == doctest::Approx(15.0));
}

TEST_CASE("subtree bound sums committed and bounded costs") {
  auto pr = two_bubble_chain();

  BnbNode root;
  root.queues.assign(kNumBranches, {});
  root.queues[0] = {1, 2};
  velbound(root, pr);
  double root_bound = subtree_lower_bound(root, pr);
  // Root: every bubble at its own cap, no coupling committed yet.
  CHECK(root_bound == doctest::Approx(pr.phi(pr.bubbles[0], 15.0) + pr.phi(pr.bubbles[1], 14.0)));

  // Full prefix equals the velopt cost exactly.
  auto sol = velopt(pr, {1, 2});
  BnbNode leaf;
  leaf.prefix = {1, 2};
  leaf.prefix_vbar = sol.vbar;
  leaf.queues.assign(kNumBranches, {});
  velbound(leaf, pr);
  CHECK(subtree_lower_bound(leaf, pr) == doctest::Approx(sol.cost).epsilon(1e-12));
}

TEST_CASE("branch and bound equals brute force on random instances") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 60; ++trial) {
    auto pr = testing::random_instance(rng);
    BnbStats stats;
    auto bb = branch_and_bound(pr, &stats);
    auto oracle = brute_force_schedule(pr);
    REQUIRE(bb.feasible);
    CHECK(bb.cost == doctest::Approx(oracle.cost).epsilon(1e-9));
    CHECK(stats.nodes_visited >= 1);

    // Returned order respects per-branch arrival order and occupancy gaps.
    for (std::size_t a = 0; a < bb.order.size(); ++a) {
      for (std::size_t b = a + 1; b < bb.order.size(); ++b) {
        const ScheduleBubble *ba = nullptr, *bbub = nullptr;
        for (const auto& x : pr.bubbles) {
          if (x.id == bb.order[a]) ba = &x;
          if (x.id == bb.order[b]) bbub = &x;
        }
        if (ba->branch == bbub->branch) CHECK(ba->d < bbub->d);
      }
      CHECK(bb.tau[a] >= pr.tau_min - 1e-9);
      if (a > 0) {
        const ScheduleBubble* prev = nullptr;
        for (const auto& x : pr.bubbles) {
          if (x.id == bb.order[a - 1]) prev = &x;
        }
        CHECK(bb.tau[a] >= bb.tau[a - 1] + prev->tau_occ - 1e-9);
      }
    }
  }
}

TEST_CASE("single-branch instances have exactly one order") {
  ScheduleProblem pr;
  pr.bubbles.push_back({0, 3, 80.0, 0.0, 15.0, 2.0, 1});
  pr.bubbles.push_back({1, 3, 120.0, 0.0, 14.0, 2.0, 1});
  pr.bubbles.push_back({2, 3, 190.0, 0.0, 13.0, 2.0, 1});
  CHECK(enumerate_orders(pr).size() == 1);
  auto bb = branch_and_bound(pr);
  auto direct = velopt(pr, {0, 1, 2});
  CHECK(bb.cost == doctest::Approx(direct.cost));
}

TEST_CASE("two plus two bubbles enumerate the multiset permutations") {
  ScheduleProblem pr;
  pr.bubbles.push_back({0, 1, 80.0, 0.0, 15.0, 2.0, 1});
  pr.bubbles.push_back({1, 1, 120.0, 0.0, 14.0, 2.0, 1});
  pr.bubbles.push_back({2, 2, 90.0, 0.0, 15.0, 2.0, 1});
  pr.bubbles.push_back({3, 2, 130.0, 0.0, 14.0, 2.0, 1});
  CHECK(enumerate_orders(pr).size() == 6);  // 4! / (2! 2!)
}

TEST_CASE("brute force refuses oversized instances") {
  ScheduleProblem pr;
  for (int i = 0; i < 9; ++i) pr.bubbles.push_back({i, 1 + i % 4, 80.0 + 10.0 * i, 0.0, 15.0, 2.0, 1});
  CHECK_THROWS_AS(brute_force_schedule(pr), std::invalid_argument);
}

TEST_CASE("velopt meets the grid search optimum") {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 12; ++trial) {
    auto pr = testing::random_instance(rng, 3);
    auto orders = enumerate_orders(pr);
    const auto& order = orders[rng() % orders.size()];
    auto sol = velopt(pr, order);
    double grid = testing::grid_min_cost(pr, order);
    if (!sol.feasible) continue;
    CHECK(sol.cost <= grid + 1e-6);
  }
}

TEST_CASE("instance text format round trip and parse errors") {
  auto pr = two_bubble_chain();
  pr.t_s = 3.77;
  pr.tau_min = 12.5;
  std::istringstream in(format_schedule_instance(pr));
  auto back = parse_schedule_instance(in);
  CHECK(back.t_s == pr.t_s);
  CHECK(back.tau_min == pr.tau_min);
  REQUIRE(back.bubbles.size() == pr.bubbles.size());
  CHECK(back.bubbles[1].d == pr.bubbles[1].d);
  CHECK(back.bubbles[1].vbar_max == pr.bubbles[1].vbar_max);

  std::istringstream bad("0 0\n1 1 100 0 15 5\n");  // missing the size field
  try {
    parse_schedule_instance(bad);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}
