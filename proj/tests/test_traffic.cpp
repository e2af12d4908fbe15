#include <cmath>

#include "doctest.h"
#include "env/world_state.hpp"
#include "traffic/traffic.hpp"

using namespace vqmorl;
using namespace vqmorl::traffic;

namespace {

VehicleState car(int id, int lane, double x, double v, bool ego = false) {
  VehicleState c;
  c.id = id;
  c.lane = lane;
  c.x = x;
  c.v = v;
  c.is_ego = ego;
  return c;
}

WorldState world_with(std::vector<VehicleState> cars) {
  WorldState w;
  w.vehicles = std::move(cars);
  w.seed = 42;
  return w;
}

// smallest bumper gap between same-lane neighbours
double min_gap(const WorldState& w) {
  double g = w.road.length;
  for (std::size_t i = 0; i < w.vehicles.size(); ++i)
    if (auto l = find_leader(w, i)) g = std::min(g, l->gap);
  return g;
}

}  // namespace

TEST_CASE("IDM free road") {
  IdmParams p;
  CHECK(idm_acceleration(p.v0, std::nullopt, p, 8.0).acceleration == 0.0);
  CHECK(idm_acceleration(0.0, std::nullopt, p, 8.0).acceleration == p.a_max);
}

TEST_CASE("IDM equilibrium gap is a root of the acceleration") {
  IdmParams p;
  for (double v : {5.0, 12.0, 20.0, 24.0}) {
    double s = idm_equilibrium_gap(v, p);
    CHECK(std::abs(idm_acceleration(v, Leader{s, v}, p, 8.0).acceleration) < 1e-9);
    // found independently by bisection
    double lo = p.s0, hi = 1e4;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      (idm_acceleration(v, Leader{mid, v}, p, 8.0).acceleration < 0 ? lo : hi) = mid;
    }
    CHECK(lo == doctest::Approx(s).epsilon(1e-9));
  }
}

TEST_CASE("IDM with a non-positive gap brakes hard") {
  IdmParams p;
  auto r = idm_acceleration(20.0, Leader{0.0, 20.0}, p, 8.0);
  CHECK(r.imminent_collision);
  CHECK(r.acceleration == -8.0);
}

TEST_CASE("driving actions") {
  SUBCASE("lane left from lane 0 is clamped") {
    auto w = apply_driving_action(world_with({car(0, 0, 100, 25, true)}), DrivingAction::LaneLeft);
    CHECK(w.vehicles[0].lane == 0);
  }
  SUBCASE("lane right into an empty lane") {
    auto w = apply_driving_action(world_with({car(0, 1, 100, 25, true)}), DrivingAction::LaneRight);
    CHECK(w.vehicles[0].lane == 2);
    CHECK_FALSE(w.lane_change_rejected);
  }
  SUBCASE("lane change into a short gap is rejected") {
    auto w = apply_driving_action(world_with({car(0, 1, 100, 25, true), car(1, 2, 110, 25)}), DrivingAction::LaneRight);
    CHECK(w.vehicles[0].lane == 1);
    CHECK(w.lane_change_rejected);
  }
  SUBCASE("faster then one kinematic step") {
    auto w = apply_driving_action(world_with({car(0, 1, 100, 25, true)}), DrivingAction::Faster);
    w = step_kinematics(w, w.road.dt);
    CHECK(w.vehicles[0].v == doctest::Approx(25 + w.road.a_ego_step * w.road.dt));
  }
  SUBCASE("speed never exceeds the hard cap") {
    auto w = world_with({car(0, 1, 100, 39.9, true)});
    w = apply_driving_action(w, DrivingAction::Faster);
    w = step_kinematics(w, 1.0);
    CHECK(w.vehicles[0].v == w.road.v_hard_max);
  }
  CHECK_THROWS(driving_action_from_index(0));
  CHECK_THROWS(driving_action_from_index(6));
}

TEST_CASE("kinematics") {
  SUBCASE("constant speed") {
    auto w = world_with({car(0, 0, 100, 20, true)});
    w = step_kinematics(w, 1.0);
    CHECK(w.vehicles[0].x == doctest::Approx(120.0));
  }
  SUBCASE("no reversing") {
    auto w = world_with({car(0, 0, 100, 1, true)});
    w.vehicles[0].a = -5.0;
    w = step_kinematics(w, 1.0);
    CHECK(w.vehicles[0].v == 0.0);
  }
  SUBCASE("ego wraps around the ring") {
    auto w = world_with({car(0, 0, 995, 20, true)});
    w = step_kinematics(w, 1.0);
    CHECK(w.vehicles[0].x == doctest::Approx(15.0));
  }
  SUBCASE("re-entering background speed respects the leader") {
    auto w = world_with({car(0, 3, 500, 20, true), car(1, 0, 995, 25), car(2, 0, 20, 0)});
    w = step_kinematics(w, 1.0);
    auto l = find_leader(w, 1);
    REQUIRE(l);
    CHECK(w.vehicles[1].v <= std::max(0.0, (l->gap - w.idm.s0) / w.idm.T) + 1e-12);
  }
}

TEST_CASE("collision detection") {
  CHECK(detect_collision(world_with({car(0, 1, 100, 20, true), car(1, 1, 110, 20)})) == 0);
  CHECK(detect_collision(world_with({car(0, 1, 100, 20, true), car(1, 1, 104.9, 20)})) == 1);
  CHECK(detect_collision(world_with({car(0, 1, 100, 20, true), car(1, 2, 102, 20)})) == 0);
  // across the seam of the ring
  CHECK(detect_collision(world_with({car(0, 1, 997, 20, true), car(1, 1, 1.0, 20)})) == 1);
}

TEST_CASE("ring leader lookup") {
  auto w = world_with({car(0, 1, 990, 20, true), car(1, 1, 30, 22), car(2, 1, 500, 22)});
  auto l = find_leader(w, 0);
  REQUIRE(l);
  CHECK(l->gap == doctest::Approx(35.0));
  CHECK(l->speed == 22.0);
  CHECK_FALSE(find_leader(world_with({car(0, 1, 10, 20, true), car(1, 2, 30, 22)}), 0));
}

TEST_CASE("IDM platoon stays collision free") {
  std::vector<VehicleState> cars;
  cars.push_back(car(0, 3, 0, 25, true));  // ego parked in another lane
  for (int i = 0; i < 10; ++i) cars.push_back(car(i + 1, 0, 300 - 25.0 * i, 22.0 + 0.3 * i));
  auto w = world_with(cars);
  w.vehicles[0].v = 0.0;
  double worst = w.road.length;
  for (int step = 0; step < 1000; ++step) {
    w = step_kinematics(w, w.road.dt);
    worst = std::min(worst, min_gap(w));
  }
  CHECK(worst > 0.0);
}
