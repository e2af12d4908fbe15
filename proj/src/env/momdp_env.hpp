#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "common/features.hpp"
#include "env/world_state.hpp"
#include "learn/environment.hpp"
#include "radio/radio.hpp"
#include "traffic/traffic.hpp"

namespace vqmorl::env {

struct EnvConfig {
  double omega1 = 1.0;
  double omega2 = 5.0;
  double omega3 = 1e-10;
  int horizon = 60;
  int n_background = 8;
  double desired_velocity = 25.0;

  void validate() const;
  bool operator==(const EnvConfig&) const = default;
};

/// Everything needed to build and step a world.
struct EnvSettings {
  EnvConfig env;
  traffic::RoadConfig road;
  traffic::IdmParams idm;  // v0 is replaced by env.desired_velocity
  radio::RadioConfig radio;

  void validate() const;
  traffic::IdmParams effective_idm() const;
  bool operator==(const EnvSettings&) const = default;
};

/// Driving action (1..5) paired with a tele action (1..3). flat = 3 (tran - 1) + (tele - 1).
class JointAction {
 public:
  JointAction(int tran, int tele);
  static JointAction from_flat(std::size_t flat);

  int tran() const noexcept { return tran_; }
  int tele() const noexcept { return tele_; }
  std::size_t flat() const noexcept { return static_cast<std::size_t>(3 * (tran_ - 1) + (tele_ - 1)); }

 private:
  int tran_;
  int tele_;
};

struct Neighbor {
  int id = 0;
  int lane = 0;
  double dx = 0.0;  // signed ring offset from the ego, m
  double v = 0.0;
};

struct RawObservation {
  double ego_x = 0.0;
  double ego_v = 0.0;
  int ego_lane = 0;
  std::optional<double> leader_gap;
  std::vector<Neighbor> neighbors;
  bool attached = false;
  int n_serving = 0;
  int q_serving = 1;
  std::vector<double> candidate_sinr_db;  // candidate order (rate descending)
};

struct Observation {
  RawObservation raw;
  FeatureVector embedded;
};

struct RewardVector {
  double r_tran = 0.0;
  double r_tele = 0.0;
  double total = 0.0;
};

struct StepInfo {
  double rate = 0.0;
  double sinr = 0.0;
  int ho_count = 0;
  double xi = 0.0;
  int collision = 0;
  bool lane_change_rejected = false;
  std::optional<int> serving_bs;
};

struct StepOutcome {
  WorldState world;
  Observation observation;
  RewardVector reward;
  bool done = false;
  StepInfo info;
};

std::pair<WorldState, Observation> reset(const EnvSettings& settings, std::uint64_t seed);

RawObservation observe(const WorldState& world);

/// Five features in [-1, 1]: speed, lane, leader gap, best candidate SINR,
/// serving-station load.
FeatureVector embed(const RawObservation& raw, const traffic::RoadConfig& road);

/// omega1 * clamp((v - v_min) / (v_max - v_min), 0, 1) - omega2 * collision.
double reward_tran(double speed, int collision, const EnvConfig& cfg, const traffic::RoadConfig& road);

/// omega3 * rate * (1 - min(1, xi)).
double reward_tele(double rate, double xi, double omega3);

StepOutcome step(const EnvSettings& settings, WorldState world, JointAction action);

/// Stateful wrapper used by the learner and the C API.
class MomdpEnv final : public learn::Environment {
 public:
  explicit MomdpEnv(EnvSettings settings);

  FeatureVector reset(std::uint64_t seed) override;
  learn::StepFeedback step(std::size_t action) override;

  const WorldState& world() const noexcept { return world_; }
  const Observation& observation() const noexcept { return observation_; }
  const RewardVector& last_reward() const noexcept { return last_reward_; }
  const StepInfo& last_info() const noexcept { return last_info_; }
  const EnvSettings& settings() const noexcept { return settings_; }

 private:
  EnvSettings settings_;
  WorldState world_;
  Observation observation_;
  RewardVector last_reward_;
  StepInfo last_info_;
  bool started_ = false;
};

}  // namespace vqmorl::env
