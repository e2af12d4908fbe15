#pragma once

#include <optional>
#include <ostream>

#include "env/world_state.hpp"

namespace vqmorl::traffic {

enum class DrivingAction { LaneLeft = 1, Idle = 2, LaneRight = 3, Faster = 4, Slower = 5 };

/// Maps 1..5 onto DrivingAction; anything else throws InvalidArgument.
DrivingAction driving_action_from_index(int index);

struct Leader {
  double gap = 0.0;    // bumper-to-bumper, m
  double speed = 0.0;  // m/s
};

struct IdmResult {
  double acceleration = 0.0;
  bool imminent_collision = false;
};

/// a_max [1 - (v/v0)^delta - (s*/s)^2], s* = s0 + vT + v dv / (2 sqrt(a_max b)).
/// A non-positive gap yields -b_emergency and sets imminent_collision.
IdmResult idm_acceleration(double speed, const std::optional<Leader>& leader, const IdmParams& p, double b_emergency);

/// Straight-road form: the leader must be ahead of `self` in the same lane.
IdmResult idm_acceleration(const VehicleState& self, const std::optional<VehicleState>& leader, const IdmParams& p,
                           double b_emergency);

/// Spacing at which a follower at speed v behind an equal-speed leader has zero
/// IDM acceleration.
double idm_equilibrium_gap(double v, const IdmParams& p);

/// Distance travelled forward along the ring from `from` to `to`, in [0, L).
double forward_distance(double from, double to, double length);

/// Nearest same-lane vehicle ahead of vehicles[index] on the ring.
std::optional<Leader> find_leader(const WorldState& world, std::size_t index);

/// True iff the two vehicles share a lane and their [x, x + length] intervals
/// overlap on the ring.
bool vehicles_overlap(const VehicleState& a, const VehicleState& b, double road_length);

WorldState apply_driving_action(WorldState world, DrivingAction action);

/// One forward-Euler step: IDM for background vehicles, v' = clamp(v + a dt),
/// x' = x + v dt, ring wrap with speed resampling for background vehicles.
WorldState step_kinematics(WorldState world, double dt);

/// 1 iff the ego overlaps another vehicle in its lane, else 0.
int detect_collision(const WorldState& world);

void write_traffic_trace_header(std::ostream& out);
void write_traffic_trace(std::ostream& out, const WorldState& world, double time_s);

}  // namespace vqmorl::traffic
