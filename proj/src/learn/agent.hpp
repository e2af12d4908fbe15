#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "learn/environment.hpp"
#include "learn/q_function.hpp"
#include "learn/replay_memory.hpp"

namespace vqmorl::learn {

struct AgentConfig {
  double gamma = 0.9;
  double lr = 1e-3;
  std::size_t batch_size = 32;
  std::size_t capacity = 10000;
  std::size_t target_sync_period = 100;
  double epsilon_start = 1.0;
  double epsilon_min = 0.05;
  double epsilon_decay = 0.98;
  bool double_q = false;
  std::size_t warmup = 500;

  void validate() const;
  bool operator==(const AgentConfig&) const = default;
};

/// With probability epsilon a uniform action, else argmax Q (lowest index on
/// ties). Always consumes exactly one uniform draw, plus one index draw when
/// exploring.
std::size_t select_action(const QFunction& q, const FeatureVector& s, double epsilon, Rng& rng);

/// Lowest-index argmax.
std::size_t greedy_action(const QVector& q);

/// r if done; else r + gamma max_a' target(s')[a'], or with double_q
/// r + gamma target(s')[argmax_a' online(s')[a']].
double td_target(const Transition& tr, const QFunction& target_q, const QFunction& online_q, double gamma, bool double_q);

/// Mean squared TD error over the batch.
double loss(const QFunction& q, std::span<const Transition> batch, std::span<const double> targets);

struct GradientStepStats {
  double loss = 0.0;  // before the update
  double grad_norm = 0.0;
};

/// theta <- theta - lr * grad L with targets held constant.
GradientStepStats gradient_step(QFunction& q, std::span<const Transition> batch, std::span<const double> targets, double lr);

/// Copies online parameters into target; architectures must match.
void sync_target(const QFunction& online, QFunction& target);

struct MetricsRow {
  int episode = 0;
  int steps = 0;
  double sum_r_tran = 0.0;
  double sum_r_tele = 0.0;
  double sum_total = 0.0;
  int collided = 0;
  int ho_count = 0;
  double epsilon = 0.0;
  double wallclock_ms = 0.0;
  bool operator==(const MetricsRow&) const = default;
};

using MetricsLog = std::vector<MetricsRow>;

struct RunOptions {
  int episodes = 0;
  std::uint64_t seed = 0;
  bool record_wallclock = false;
  /// Called with the pre-action observation of each episode.
  std::function<void(int episode, const FeatureVector&)> on_reset;
  /// Called after every environment step.
  std::function<void(int episode, int t, std::size_t action, const StepFeedback&)> on_step;
};

/// Seed of the environment for a given episode; identical for every backend.
std::uint64_t episode_seed(std::uint64_t base, int episode);
std::uint64_t eval_episode_seed(std::uint64_t base, int episode);

/// Experience-replay Q-learning with a periodically synchronized target.
MetricsLog train(Environment& env, QFunction& online, const AgentConfig& cfg, const RunOptions& opts);

/// Greedy rollouts; never modifies `q`.
MetricsLog evaluate(Environment& env, const QFunction& q, const RunOptions& opts);

void write_metrics_csv(std::ostream& out, const MetricsLog& log);
MetricsLog read_metrics_csv(const std::string& text);

}  // namespace vqmorl::learn
