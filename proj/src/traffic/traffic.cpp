#include "traffic/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "common/rng.hpp"

namespace vqmorl {

std::size_t WorldState::ego_index() const {
  for (std::size_t i = 0; i < vehicles.size(); ++i)
    if (vehicles[i].is_ego) return i;
  throw Error(ErrorCode::State, "world has no ego vehicle");
}

namespace traffic {

void IdmParams::validate() const {
  if (!(v0 > 0 && T > 0 && a_max > 0 && b > 0 && s0 > 0)) throw ConfigError("IDM parameters must be strictly positive");
  if (!(delta >= 1.0)) throw ConfigError("IDM delta must be >= 1");
}

void RoadConfig::validate() const {
  if (lanes != 4) throw ConfigError("traffic.lanes: the road has exactly 4 lanes");
  if (!(lane_width > 0)) throw ConfigError("traffic.lane_width must be positive");
  if (!(dt > 0)) throw ConfigError("traffic.dt must be positive");
  if (action_repeat < 1) throw ConfigError("traffic.action_repeat must be >= 1");
  if (!(v_min < v_max)) throw ConfigError("traffic.v_min must be below traffic.v_max");
  if (!(v_min >= 0)) throw ConfigError("traffic.v_min must be non-negative");
  if (!(v_hard_max >= v_max)) throw ConfigError("traffic.v_hard_max must be >= traffic.v_max");
  if (!(a_ego_step > 0)) throw ConfigError("traffic.a_ego_step must be positive");
  if (!(vehicle_length > 0)) throw ConfigError("traffic.vehicle_length must be positive");
  if (!(b_emergency > 0)) throw ConfigError("traffic.b_emergency must be positive");
  if (!(length > 10 * vehicle_length)) throw ConfigError("traffic.length is too short for the vehicle length");
}

DrivingAction driving_action_from_index(int index) {
  if (index < 1 || index > 5) throw Error(ErrorCode::InvalidArgument, "driving action index must be in 1..5, got " + std::to_string(index));
  return static_cast<DrivingAction>(index);
}

IdmResult idm_acceleration(double speed, const std::optional<Leader>& leader, const IdmParams& p, double b_emergency) {
  const double free_term = std::pow(speed / p.v0, p.delta);
  if (!leader) return {p.a_max * (1.0 - free_term), false};
  if (leader->gap <= 0.0) return {-b_emergency, true};
  const double dv = speed - leader->speed;
  const double s_star = p.s0 + speed * p.T + speed * dv / (2.0 * std::sqrt(p.a_max * p.b));
  const double ratio = s_star / leader->gap;
  return {p.a_max * (1.0 - free_term - ratio * ratio), false};
}

IdmResult idm_acceleration(const VehicleState& self, const std::optional<VehicleState>& leader, const IdmParams& p,
                           double b_emergency) {
  if (!leader) return idm_acceleration(self.v, std::nullopt, p, b_emergency);
  return idm_acceleration(self.v, Leader{leader->x - self.front(), leader->v}, p, b_emergency);
}

double idm_equilibrium_gap(double v, const IdmParams& p) {
  return (p.s0 + v * p.T) / std::sqrt(1.0 - std::pow(v / p.v0, p.delta));
}

double forward_distance(double from, double to, double length) {
  double d = std::fmod(to - from, length);
  if (d < 0) d += length;
  return d;
}

std::optional<Leader> find_leader(const WorldState& world, std::size_t index) {
  const auto& self = world.vehicles[index];
  std::optional<Leader> best;
  double best_dist = 0.0;
  for (std::size_t j = 0; j < world.vehicles.size(); ++j) {
    if (j == index) continue;
    const auto& other = world.vehicles[j];
    if (other.lane != self.lane) continue;
    const double d = forward_distance(self.x, other.x, world.road.length);
    if (!best || d < best_dist) {
      best_dist = d;
      best = Leader{d - self.length, other.v};
    }
  }
  return best;
}

bool vehicles_overlap(const VehicleState& a, const VehicleState& b, double road_length) {
  if (a.lane != b.lane) return false;
  return forward_distance(a.x, b.x, road_length) < a.length || forward_distance(b.x, a.x, road_length) < b.length;
}

namespace {

/// Smallest bumper gap between `self` (moved into `lane`) and any vehicle in
/// that lane, in either direction. Negative when they would overlap.
double min_gap_in_lane(const WorldState& world, std::size_t index, int lane) {
  const auto& self = world.vehicles[index];
  double gap = world.road.length;
  for (std::size_t j = 0; j < world.vehicles.size(); ++j) {
    if (j == index || world.vehicles[j].lane != lane) continue;
    const auto& other = world.vehicles[j];
    VehicleState moved = self;
    moved.lane = lane;
    if (vehicles_overlap(moved, other, world.road.length)) return -1.0;
    const double ahead = forward_distance(self.x, other.x, world.road.length) - self.length;
    const double behind = forward_distance(other.x, self.x, world.road.length) - other.length;
    gap = std::min({gap, ahead, behind});
  }
  return gap;
}

}  // namespace

WorldState apply_driving_action(WorldState world, DrivingAction action) {
  const std::size_t ego = world.ego_index();
  auto& car = world.vehicles[ego];
  world.lane_change_rejected = false;

  int target_lane = car.lane;
  switch (action) {
    case DrivingAction::LaneLeft:
      target_lane = std::max(0, car.lane - 1);
      car.a = 0.0;
      break;
    case DrivingAction::LaneRight:
      target_lane = std::min(world.road.lanes - 1, car.lane + 1);
      car.a = 0.0;
      break;
    case DrivingAction::Idle:
      car.a = 0.0;
      break;
    case DrivingAction::Faster:
      car.a = world.road.a_ego_step;
      break;
    case DrivingAction::Slower:
      car.a = -world.road.a_ego_step;
      break;
  }
  if (target_lane != car.lane) {
    const double safety = world.idm.s0 + car.v * world.idm.T;
    if (min_gap_in_lane(world, ego, target_lane) < safety) {
      world.lane_change_rejected = true;
    } else {
      car.lane = target_lane;
    }
  }
  return world;
}

WorldState step_kinematics(WorldState world, double dt) {
  if (!(dt > 0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  const auto& road = world.road;
  const std::size_t n = world.vehicles.size();

  for (std::size_t i = 0; i < n; ++i) {
    if (world.vehicles[i].is_ego) continue;
    world.vehicles[i].a = idm_acceleration(world.vehicles[i].v, find_leader(world, i), world.idm, road.b_emergency).acceleration;
  }

  std::vector<std::size_t> wrapped;
  for (std::size_t i = 0; i < n; ++i) {
    auto& veh = world.vehicles[i];
    const double v_old = veh.v;
    veh.v = std::clamp(v_old + veh.a * dt, 0.0, road.v_hard_max);
    veh.x += v_old * dt;
    if (veh.x >= road.length) {
      veh.x -= road.length;
      if (!veh.is_ego) wrapped.push_back(i);
    }
  }

  // Re-entering background vehicles get a fresh speed, capped so that the
  // headway to the new leader is at least the IDM desired gap.
  for (std::size_t i : wrapped) {
    const double lo = std::min(road.v_min, world.idm.v0);
    const double hi = std::max(road.v_min, world.idm.v0);
    const double u = unit_interval(hash64({world.seed, 0x77726170ULL, static_cast<std::uint64_t>(world.tick),
                                           static_cast<std::uint64_t>(world.vehicles[i].id)}));
    double v = lo + (hi - lo) * u;
    if (auto leader = find_leader(world, i)) {
      const double cap = std::max(0.0, (leader->gap - world.idm.s0) / world.idm.T);
      v = std::min(v, cap);
    }
    world.vehicles[i].v = std::clamp(v, 0.0, road.v_hard_max);
  }
  ++world.tick;
  return world;
}

int detect_collision(const WorldState& world) {
  const std::size_t ego = world.ego_index();
  for (std::size_t j = 0; j < world.vehicles.size(); ++j) {
    if (j == ego) continue;
    if (vehicles_overlap(world.vehicles[ego], world.vehicles[j], world.road.length)) return 1;
  }
  return 0;
}

void write_traffic_trace_header(std::ostream& out) {
  CsvWriter(out).write_row({"t", "id", "lane", "x", "v", "a", "is_ego"});
}

void write_traffic_trace(std::ostream& out, const WorldState& world, double time_s) {
  CsvWriter w(out);
  for (const auto& v : world.vehicles) {
    w.write_row({format_double(time_s), std::to_string(v.id), std::to_string(v.lane), format_double(v.x), format_double(v.v),
                 format_double(v.a), v.is_ego ? "1" : "0"});
  }
}

}  // namespace traffic
}  // namespace vqmorl
