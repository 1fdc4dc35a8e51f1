#include "doctest.h"

#include "crossflow/baseline.hpp"
#include "crossflow/kinematics.hpp"

using namespace crossflow;

namespace {
const Params kP;

VehicleState make_vehicle(int id, int branch, double pos, double vel) {
  VehicleState v;
  v.id = id;
  v.branch = branch;
  v.pos = pos;
  v.vel = vel;
  return v;
}

std::vector<std::vector<VehicleState>> empty_world() {
  return std::vector<std::vector<VehicleState>>(kNumBranches);
}

}  // namespace

TEST_CASE("stopping test splits committed from stoppable") {
  // Stopping distance at v_max is 34.72 m.
  CHECK(!can_stop_before_line(make_vehicle(1, 1, -5.0, 50.0 / 3.0), kP));
  CHECK(can_stop_before_line(make_vehicle(1, 1, -100.0, 50.0 / 3.0), kP));
}

TEST_CASE("green expires into yellow and classifies the branch") {
  auto world = empty_world();
  world[0].push_back(make_vehicle(1, 1, -5.0, 50.0 / 3.0));    // cannot stop
  world[0].push_back(make_vehicle(2, 1, -100.0, 50.0 / 3.0));  // can stop

  SignalState st;  // branch 1 green from t = 0
  st = signal_step(st, world, 9.99, kP);
  CHECK(st.phase == SignalPhase::green);
  st = signal_step(st, world, 10.0, kP);
  CHECK(st.phase == SignalPhase::yellow);
  CHECK(st.committed.count(1) == 1);
  CHECK(st.committed.count(2) == 0);
  CHECK(st.virtual_active[0]);
}

TEST_CASE("yellow with no committed vehicles hands over immediately") {
  auto world = empty_world();
  SignalState st;
  st = signal_step(st, world, 10.0, kP);
  CHECK(st.phase == SignalPhase::green);
  CHECK(st.active_branch == 2);
  CHECK(!st.virtual_active[1]);
  CHECK(st.virtual_active[0]);
}

TEST_CASE("round robin visits all branches in order") {
  auto world = empty_world();
  SignalState st;
  std::vector<int> order;
  double t = 0.0;
  for (int i = 0; i < 8; ++i) {
    t += kP.green_time;
    st = signal_step(st, world, t, kP);
    order.push_back(st.active_branch);
  }
  CHECK(order == std::vector<int>{2, 3, 4, 1, 2, 3, 4, 1});
}

TEST_CASE("yellow waits for the committed group to clear") {
  auto world = empty_world();
  world[0].push_back(make_vehicle(1, 1, -5.0, 50.0 / 3.0));
  SignalState st;
  st = signal_step(st, world, 10.0, kP);
  REQUIRE(st.phase == SignalPhase::yellow);

  st = signal_step(st, world, 10.5, kP);
  CHECK(st.phase == SignalPhase::yellow);  // still inside

  world[0][0].pos = kP.crossing_end();  // cleared
  st = signal_step(st, world, 11.0, kP);
  CHECK(st.phase == SignalPhase::green);
  CHECK(st.active_branch == 2);
}

TEST_CASE("late arrivals on yellow are classified once") {
  auto world = empty_world();
  world[0].push_back(make_vehicle(1, 1, -5.0, 50.0 / 3.0));
  SignalState st;
  st = signal_step(st, world, 10.0, kP);
  world[0].push_back(make_vehicle(2, 1, -3.0, 50.0 / 3.0));  // hypothetical late committed
  st = signal_step(st, world, 10.01, kP);
  CHECK(st.committed.count(2) == 1);
}

TEST_CASE("virtual vehicle leads the first stoppable vehicle only") {
  auto world = empty_world();
  world[0].push_back(make_vehicle(1, 1, -5.0, 50.0 / 3.0));    // committed
  world[0].push_back(make_vehicle(2, 1, -100.0, 50.0 / 3.0));  // first stoppable
  world[0].push_back(make_vehicle(3, 1, -130.0, 50.0 / 3.0));  // follows vehicle 2
  SignalState st;
  st = signal_step(st, world, 10.0, kP);

  auto lead1 = baseline_leader(world[0], 0, st, kP);
  CHECK(is_sentinel(lead1));  // committed front vehicle keeps the real chain
  auto lead2 = baseline_leader(world[0], 1, st, kP);
  CHECK(lead2.id == -2);
  CHECK(lead2.pos == kP.vehicle_length);
  auto lead3 = baseline_leader(world[0], 2, st, kP);
  CHECK(lead3.id == 2);

  // Red branch: the front vehicle faces the virtual stop.
  world[1].push_back(make_vehicle(4, 2, -60.0, 10.0));
  auto lead4 = baseline_leader(world[1], 0, st, kP);
  CHECK(lead4.id == -2);
}

TEST_CASE("baseline control floors it on a free road and holds the limit") {
  VehicleState self = make_vehicle(1, 1, -100.0, 10.0);
  CHECK(baseline_vehicle_control(self, sentinel_leader(kP), kP) == kP.u_max);
  self.vel = kP.v_max;
  CHECK(baseline_vehicle_control(self, sentinel_leader(kP), kP) == 0.0);
}

TEST_CASE("a vehicle approaching the virtual stop halts with its front at the line") {
  VehicleState self = make_vehicle(1, 1, -80.0, 50.0 / 3.0);
  VehicleState wall = virtual_stop_vehicle(kP);
  double dt = 0.01;
  for (int step = 0; step < 4000 && self.vel > 0.0; ++step) {
    double u = baseline_vehicle_control(self, wall, kP);
    self = step_integrate(self, u, dt, kP);
    double sigma = safety_ratio({wall.pos - self.pos, wall.vel, self.vel}, kP);
    CHECK(sigma >= 1.0 - 1e-6);
  }
  CHECK(self.vel == 0.0);
  CHECK(self.pos <= 0.0);
  CHECK(self.pos >= -35.0);  // actually stopped near the line, not far upstream
}
