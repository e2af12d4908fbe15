#pragma once

namespace vqmorl::traffic {

struct VehicleState {
  int id = 0;
  int lane = 0;
  double x = 0.0;       // rear bumper, m
  double v = 0.0;       // m/s
  double a = 0.0;       // m/s^2
  double length = 5.0;  // m
  bool is_ego = false;

  double front() const { return x + length; }
  bool operator==(const VehicleState&) const = default;
};

/// Intelligent Driver Model parameters.
struct IdmParams {
  double v0 = 25.0;    // desired speed
  double T = 1.5;      // safe time headway
  double a_max = 1.5;  // maximum acceleration
  double b = 2.0;      // comfortable deceleration
  double s0 = 2.0;     // minimum gap
  double delta = 4.0;  // acceleration exponent

  void validate() const;
  bool operator==(const IdmParams&) const = default;
};

/// Ring road with four parallel lanes. Lane 0 is the leftmost lane.
struct RoadConfig {
  int lanes = 4;
  double lane_width = 4.0;
  double length = 1000.0;
  double dt = 0.25;
  int action_repeat = 4;
  double v_min = 20.0;
  double v_max = 30.0;
  double v_hard_max = 40.0;
  double a_ego_step = 2.0;
  double vehicle_length = 5.0;
  double b_emergency = 8.0;

  void validate() const;
  double lane_center(int lane) const { return (lane + 0.5) * lane_width; }
  bool operator==(const RoadConfig&) const = default;
};

}  // namespace vqmorl::traffic
