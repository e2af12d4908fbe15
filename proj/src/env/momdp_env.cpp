#include "env/momdp_env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace vqmorl::env {

namespace {

constexpr std::uint64_t kSpawnStream = 0x737061776eULL;

/// Recomputes every link, candidate list and load, then lets each vehicle pick
/// a station: the ego by `ego_action`, background vehicles by max rate.
void refresh_network(WorldState& world, radio::TeleAction ego_action) {
  const std::size_t n = world.vehicles.size();
  const std::size_t ego = world.ego_index();
  const double threshold = world.radio.sinr_threshold_linear();

  std::vector<std::vector<radio::LinkBudget>> links(n);
  for (std::size_t i = 0; i < n; ++i) {
    links[i] = radio::evaluate_links(world.vehicles[i], world);
    world.assoc[i].candidates = radio::select_candidates(links[i], threshold);
  }
  world.loads = radio::load_counts(world.assoc, world.stations.size());

  const radio::NetworkSnapshot net{world.stations, world.loads, threshold};
  for (std::size_t i = 0; i < n; ++i) {
    auto& assoc = world.assoc[i];
    assoc.serving_sinr = assoc.serving_bs ? links[i][static_cast<std::size_t>(*assoc.serving_bs)].sinr : 0.0;
    const auto choice = radio::resolve_tele_action(i == ego ? ego_action : radio::TeleAction::MaxRate, assoc, net);
    assoc = radio::update_handoff(std::move(assoc), choice);
    if (choice) {
      const auto& link = links[i][static_cast<std::size_t>(*choice)];
      assoc.serving_sinr = link.sinr;
      assoc.serving_rate = link.rate;
    } else {
      assoc.serving_sinr = 0.0;
      assoc.serving_rate = 0.0;
    }
  }
}

}  // namespace

void EnvConfig::validate() const {
  if (!(omega1 >= 0)) throw ConfigError("env.omega1 must be >= 0");
  if (!(omega2 >= 0)) throw ConfigError("env.omega2 must be >= 0");
  if (!(omega3 >= 0)) throw ConfigError("env.omega3 must be >= 0");
  if (horizon < 1) throw ConfigError("env.horizon must be >= 1");
  if (n_background < 0) throw ConfigError("env.n_background must be >= 0");
  if (!(desired_velocity > 0)) throw ConfigError("env.desired_velocity must be positive");
}

void EnvSettings::validate() const {
  env.validate();
  road.validate();
  effective_idm().validate();
  radio.validate();
  if (!(env.desired_velocity <= road.v_hard_max)) throw ConfigError("env.desired_velocity must not exceed traffic.v_hard_max");
}

traffic::IdmParams EnvSettings::effective_idm() const {
  traffic::IdmParams p = idm;
  p.v0 = env.desired_velocity;
  return p;
}

JointAction::JointAction(int tran, int tele) : tran_(tran), tele_(tele) {
  traffic::driving_action_from_index(tran);
  radio::tele_action_from_index(tele);
}

JointAction JointAction::from_flat(std::size_t flat) {
  if (flat >= kActionCount) throw Error(ErrorCode::InvalidArgument, "flat action must be in 0..14, got " + std::to_string(flat));
  return JointAction(static_cast<int>(flat / 3) + 1, static_cast<int>(flat % 3) + 1);
}

std::pair<WorldState, Observation> reset(const EnvSettings& settings, std::uint64_t seed) {
  settings.validate();
  WorldState world;
  world.road = settings.road;
  world.idm = settings.effective_idm();
  world.radio = settings.radio;
  world.seed = seed;
  world.stations = radio::make_base_stations(settings.radio, settings.road.length);

  // Each lane is cut into slots wide enough for a vehicle plus the spawn
  // headway; vehicles take distinct random slots with a random offset inside.
  const auto& road = settings.road;
  const double spawn_gap = world.idm.s0 + road.v_max * world.idm.T;
  const int slots_per_lane = static_cast<int>(std::floor(road.length / (road.vehicle_length + spawn_gap)));
  const int total_slots = slots_per_lane * road.lanes;
  const int vehicles = settings.env.n_background + 1;
  if (vehicles > total_slots)
    throw ConfigError("env.n_background = " + std::to_string(settings.env.n_background) + " is infeasible: the road fits at most " +
                      std::to_string(total_slots) + " vehicles with safe spacing");
  const double slot_size = road.length / slots_per_lane;
  const double slack = slot_size - (road.vehicle_length + spawn_gap);

  Rng rng(hash64({seed, kSpawnStream}));
  std::vector<int> slots(static_cast<std::size_t>(total_slots));
  std::iota(slots.begin(), slots.end(), 0);
  for (int i = 0; i < vehicles; ++i) {
    const auto j = static_cast<std::size_t>(i) + rng.index(slots.size() - static_cast<std::size_t>(i));
    std::swap(slots[static_cast<std::size_t>(i)], slots[j]);
  }
  const double v_lo = std::min(road.v_min, world.idm.v0);
  const double v_hi = std::max(road.v_min, world.idm.v0);
  for (int i = 0; i < vehicles; ++i) {
    const int slot = slots[static_cast<std::size_t>(i)];
    traffic::VehicleState v;
    v.id = i;
    v.is_ego = i == 0;
    v.lane = slot / slots_per_lane;
    v.x = (slot % slots_per_lane) * slot_size + rng.uniform(0.0, slack);
    v.v = rng.uniform(v_lo, v_hi);
    v.a = 0.0;
    v.length = road.vehicle_length;
    world.vehicles.push_back(v);
  }

  world.assoc.assign(world.vehicles.size(), radio::AssocState{});
  refresh_network(world, radio::TeleAction::MaxRate);

  Observation obs;
  obs.raw = observe(world);
  obs.embedded = embed(obs.raw, world.road);
  return {std::move(world), std::move(obs)};
}

RawObservation observe(const WorldState& world) {
  const std::size_t ego = world.ego_index();
  const auto& car = world.vehicles[ego];
  RawObservation raw;
  raw.ego_x = car.x;
  raw.ego_v = car.v;
  raw.ego_lane = car.lane;
  if (auto leader = traffic::find_leader(world, ego)) raw.leader_gap = leader->gap;
  const double half = 0.5 * world.road.length;
  for (std::size_t j = 0; j < world.vehicles.size(); ++j) {
    if (j == ego) continue;
    const auto& o = world.vehicles[j];
    double dx = traffic::forward_distance(car.x, o.x, world.road.length);
    if (dx > half) dx -= world.road.length;
    raw.neighbors.push_back({o.id, o.lane, dx, o.v});
  }
  const auto& assoc = world.assoc[ego];
  if (assoc.serving_bs) {
    const auto id = static_cast<std::size_t>(*assoc.serving_bs);
    raw.attached = true;
    raw.n_serving = world.loads[id];
    raw.q_serving = world.stations[id].quota;
  }
  for (const auto& c : assoc.candidates) raw.candidate_sinr_db.push_back(radio::linear_to_db(c.sinr));
  return raw;
}

FeatureVector embed(const RawObservation& raw, const traffic::RoadConfig& road) {
  const auto clamp1 = [](double x) { return std::clamp(x, -1.0, 1.0); };
  FeatureVector f;
  f[0] = clamp1(2.0 * (raw.ego_v - road.v_min) / (road.v_max - road.v_min) - 1.0);
  f[1] = clamp1(raw.ego_lane / 1.5 - 1.0);
  f[2] = raw.leader_gap ? clamp1(2.0 * std::tanh(*raw.leader_gap / 100.0) - 1.0) : 1.0;
  f[3] = raw.candidate_sinr_db.empty() ? -1.0 : clamp1(raw.candidate_sinr_db.front() / 40.0);
  f[4] = raw.attached ? clamp1(2.0 * std::min(1.0, static_cast<double>(raw.n_serving) / raw.q_serving) - 1.0) : -1.0;
  return f;
}

double reward_tran(double speed, int collision, const EnvConfig& cfg, const traffic::RoadConfig& road) {
  const double normalized = std::clamp((speed - road.v_min) / (road.v_max - road.v_min), 0.0, 1.0);
  return cfg.omega1 * normalized - cfg.omega2 * collision;
}

double reward_tele(double rate, double xi, double omega3) { return omega3 * rate * (1.0 - std::min(1.0, xi)); }

StepOutcome step(const EnvSettings& settings, WorldState world, JointAction action) {
  if (world.done) throw Error(ErrorCode::State, "episode already finished; call reset");

  world = traffic::apply_driving_action(std::move(world), traffic::driving_action_from_index(action.tran()));
  const bool rejected = world.lane_change_rejected;

  // Collisions are checked after every sub-step so fast closings cannot tunnel
  // through a leader between policy steps.
  int collision = 0;
  const double dt = world.road.dt;
  const int repeat = world.road.action_repeat;
  for (int r = 0; r < repeat; ++r) {
    world = traffic::step_kinematics(std::move(world), dt);
    if (traffic::detect_collision(world)) {
      collision = 1;
      break;
    }
  }
  world.lane_change_rejected = rejected;
  ++world.t;

  refresh_network(world, radio::tele_action_from_index(action.tele()));

  const std::size_t ego = world.ego_index();
  const auto& assoc = world.assoc[ego];

  StepOutcome out;
  out.info.rate = assoc.serving_rate;
  out.info.sinr = assoc.serving_sinr;
  out.info.ho_count = assoc.ho_count;
  out.info.xi = assoc.xi;
  out.info.collision = collision;
  out.info.lane_change_rejected = rejected;
  out.info.serving_bs = assoc.serving_bs;

  out.reward.r_tran = reward_tran(world.vehicles[ego].v, collision, settings.env, world.road);
  out.reward.r_tele = reward_tele(assoc.serving_rate, assoc.xi, settings.env.omega3);
  out.reward.total = out.reward.r_tran + out.reward.r_tele;

  out.done = collision == 1 || world.t >= settings.env.horizon;
  world.done = out.done;
  out.observation.raw = observe(world);
  out.observation.embedded = embed(out.observation.raw, world.road);
  out.world = std::move(world);
  return out;
}

MomdpEnv::MomdpEnv(EnvSettings settings) : settings_(std::move(settings)) { settings_.validate(); }

FeatureVector MomdpEnv::reset(std::uint64_t seed) {
  auto [world, obs] = env::reset(settings_, seed);
  world_ = std::move(world);
  observation_ = std::move(obs);
  last_reward_ = {};
  last_info_ = {};
  started_ = true;
  return observation_.embedded;
}

learn::StepFeedback MomdpEnv::step(std::size_t action) {
  if (!started_) throw Error(ErrorCode::State, "environment stepped before reset");
  auto out = env::step(settings_, std::move(world_), JointAction::from_flat(action));
  world_ = std::move(out.world);
  observation_ = std::move(out.observation);
  last_reward_ = out.reward;
  last_info_ = out.info;

  learn::StepFeedback fb;
  fb.next = observation_.embedded;
  fb.reward = out.reward.total;
  fb.terminal = out.info.collision == 1;
  fb.truncated = out.done && !fb.terminal;
  fb.r_tran = out.reward.r_tran;
  fb.r_tele = out.reward.r_tele;
  fb.collision = out.info.collision;
  fb.ho_count = out.info.ho_count;
  return fb;
}

}  // namespace vqmorl::env
