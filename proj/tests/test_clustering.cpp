#include "doctest.h"

#include <stdexcept>

#include <random>

#include "crossflow/clustering.hpp"
#include "oracles.hpp"

using namespace crossflow;

namespace {
const Params kP;

VehicleState make_vehicle(int id, int branch, double pos, double vel = 10.0) {
  VehicleState v;
  v.id = id;
  v.branch = branch;
  v.pos = pos;
  v.vel = vel;
  return v;
}
}  // namespace

TEST_CASE("zone boundaries, nearer zone wins") {
  CHECK(zone_of(-200.0, kP) == Zone::staging);
  CHECK(zone_of(-140.0, kP) == Zone::mid);
  CHECK(zone_of(-70.0, kP) == Zone::exit);
  CHECK(zone_of(5.0, kP) == Zone::intersection);
  CHECK(zone_of(-210.0, kP) == Zone::staging);
  CHECK(zone_of(-0.0001, kP) == Zone::exit);
  CHECK(zone_of(0.0, kP) == Zone::intersection);
  CHECK(zone_of(16.0, kP) == Zone::past);
  CHECK(zone_of(-500.0, kP) == Zone::past);
}

TEST_CASE("1-d clustering splits the obvious groups") {
  auto groups = kmeans_1d({-145.0, -147.0, -185.0, -188.0}, 2);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0] == std::vector<std::size_t>{0, 1});
  CHECK(groups[1] == std::vector<std::size_t>{2, 3});

  auto groups2 = kmeans_1d({-150.0, -148.0, -190.0}, 2);
  REQUIRE(groups2.size() == 2);
  CHECK(groups2[0] == std::vector<std::size_t>{1, 0});  // front first: -148 then -150
  CHECK(groups2[1] == std::vector<std::size_t>{2});
}

TEST_CASE("singleton clusters have zero cost") {
  auto groups = kmeans_1d({-150.0, -160.0, -170.0}, 3);
  REQUIRE(groups.size() == 3);
  for (const auto& g : groups) CHECK(g.size() == 1);
}

TEST_CASE("1-d clustering rejects bad input") {
  CHECK_THROWS_AS(kmeans_1d({}, 1), std::invalid_argument);
  CHECK_THROWS_AS(kmeans_1d({-1.0}, 2), std::invalid_argument);
  CHECK_THROWS_AS(kmeans_1d({-1.0}, 0), std::invalid_argument);
}

TEST_CASE("1-d clustering matches the exhaustive partition optimum") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dpos(-210.0, -140.0);
  std::uniform_int_distribution<int> dn(2, 10);
  for (int trial = 0; trial < 40; ++trial) {
    int n = dn(rng);
    std::vector<double> xs(n);
    for (auto& x : xs) x = dpos(rng);
    int m = 1 + int(rng() % std::min(4, n));
    auto groups = kmeans_1d(xs, m);
    double sse = 0.0;
    for (const auto& g : groups) {
      double mean = 0.0;
      for (auto i : g) mean += xs[i];
      mean /= double(g.size());
      for (auto i : g) sse += (xs[i] - mean) * (xs[i] - mean);
    }
    CHECK(sse == doctest::Approx(testing::exhaustive_partition_sse(xs, m)).epsilon(1e-9));
  }
}

namespace {

struct Setup {
  std::vector<std::vector<VehicleState>> branches{kNumBranches};
  std::unordered_map<int, Bubble> bubbles;
  int next_bubble_id = 100;

  void add_bubble(int id, int branch, std::vector<std::pair<int, double>> members_pos,
                  std::optional<double> tau, double tau_occ) {
    Bubble b;
    b.id = id;
    b.branch = branch;
    b.tau = tau;
    b.tau_occ_bar = tau_occ;
    for (auto [vid, pos] : members_pos) {
      auto v = make_vehicle(vid, branch, pos);
      v.bubble_id = id;
      b.members.push_back(vid);
      branches[branch - 1].push_back(v);
    }
    b.lead_pos = members_pos.front().second;
    bubbles.emplace(id, b);
  }
};

}  // namespace

TEST_CASE("retention drops bubbles that touched the exit zone and advances tau_min") {
  Setup s;
  s.add_bubble(1, 1, {{10, -60.0}, {11, -80.0}}, 40.0, 3.0);  // member in exit zone
  s.add_bubble(2, 1, {{12, -120.0}}, 50.0, 2.0);
  s.add_bubble(3, 2, {{13, -100.0}}, 55.0, 2.5);

  ClusterInstanceInput in{7.54, {1, 2, 3}, 10.0};
  auto out = cluster_and_select(in, s.branches, s.bubbles, s.next_bubble_id, kP);
  CHECK(out.list == std::vector<int>{2, 3});
  CHECK(out.new_bubbles.empty());
  CHECK(out.tau_min == doctest::Approx(43.0));  // tau_1 + occupancy_1
}

TEST_CASE("overflow pops the front of the retained list and counts in tau_min") {
  Params p = kP;
  p.max_bubbles = 8;
  Setup s;
  for (int i = 0; i < 6; ++i) {
    s.add_bubble(i, 1 + i % 2, {{20 + i, -100.0 - 5.0 * i}}, 30.0 + i, 2.0);
  }
  // Four new staging vehicles on each of branches 3 and 4 -> 2 + 2 new bubbles.
  for (int i = 0; i < 4; ++i) {
    s.branches[2].push_back(make_vehicle(40 + i, 3, -150.0 - 3.0 * i));
    s.branches[3].push_back(make_vehicle(50 + i, 4, -150.0 - 3.0 * i));
  }
  ClusterInstanceInput in{11.31, {0, 1, 2, 3, 4, 5}, 0.0};
  auto out = cluster_and_select(in, s.branches, s.bubbles, s.next_bubble_id, p);
  CHECK(out.list.size() == 8);
  CHECK(out.new_bubbles.size() == 4);
  // The two earliest retained bubbles were dropped.
  CHECK(out.list[0] == 2);
  CHECK(out.tau_min == doctest::Approx(33.0));  // max(tau_0, tau_1) + 2.0
}

TEST_CASE("per-branch cap limits new bubbles") {
  Setup s;
  for (int i = 0; i < 5; ++i) s.branches[1].push_back(make_vehicle(60 + i, 2, -145.0 - 4.0 * i));
  ClusterInstanceInput in{0.0, {}, 0.0};
  auto out = cluster_and_select(in, s.branches, s.bubbles, s.next_bubble_id, kP);
  CHECK(out.new_bubbles.size() == 2);  // branch cap
  int covered = 0;
  for (const auto& b : out.new_bubbles) covered += b.size();
  CHECK(covered == 5);
  // Members are front first and bubbles appear front-most first.
  CHECK(out.new_bubbles[0].lead_pos > out.new_bubbles[1].lead_pos);
}

TEST_CASE("a vehicle spawned exactly at the staging boundary is clustered") {
  Setup s;
  s.branches[0].push_back(make_vehicle(70, 1, kP.staging_end()));
  ClusterInstanceInput in{0.0, {}, 0.0};
  auto out = cluster_and_select(in, s.branches, s.bubbles, s.next_bubble_id, kP);
  REQUIRE(out.new_bubbles.size() == 1);
  CHECK(out.new_bubbles[0].members == std::vector<int>{70});
}

TEST_CASE("a dropped bubble without a schedule is an internal error") {
  Setup s;
  s.add_bubble(1, 1, {{10, -60.0}}, std::nullopt, 3.0);
  ClusterInstanceInput in{0.0, {1}, 0.0};
  CHECK_THROWS_AS(cluster_and_select(in, s.branches, s.bubbles, s.next_bubble_id, kP),
                  std::logic_error);
}

TEST_CASE("tau_min never decreases across instances") {
  std::mt19937_64 rng(17);
  Setup s;
  double tau_min = 0.0;
  std::vector<int> list;
  // Churn bubbles through a few synthetic instances.
  for (int instance = 0; instance < 20; ++instance) {
    double t_s = 3.77 * instance;
    ClusterInstanceInput in{t_s, list, tau_min};
    auto out = cluster_and_select(in, s.branches, s.bubbles, s.next_bubble_id, kP);
    for (Bubble& b : out.new_bubbles) {
      for (int vid : b.members) {
        for (auto& v : s.branches[b.branch - 1]) {
          if (v.id == vid) v.bubble_id = b.id;
        }
      }
      s.bubbles.emplace(b.id, b);
    }
    CHECK(out.tau_min >= tau_min);
    CHECK(out.list.size() <= std::size_t(kP.max_bubbles));
    tau_min = out.tau_min;
    list = out.list;
    for (int id : list) s.bubbles.at(id).tau = t_s + 20.0 + double(rng() % 10);
    // Advance all vehicles, spawn a couple of new ones.
    for (auto& branch : s.branches) {
      for (auto& v : branch) v.pos += 35.0;
      branch.erase(std::remove_if(branch.begin(), branch.end(),
                                  [&](const VehicleState& v) { return v.pos >= 0.0; }),
                   branch.end());
    }
    int branch = 1 + int(rng() % 4);
    s.branches[branch - 1].push_back(
        make_vehicle(1000 + instance, branch, -150.0 - double(rng() % 40)));
  }
}
