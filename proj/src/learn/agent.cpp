#include "learn/agent.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <string>

#include "common/csv.hpp"

namespace vqmorl::learn {

namespace {
constexpr std::uint64_t kAgentStream = 0x6167656e74ULL;
constexpr std::uint64_t kEpisodeStream = 0x657069736fULL;
constexpr std::uint64_t kEvalStream = 0x6576616cULL;
}  // namespace

void AgentConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("agent.gamma must be in [0, 1)");
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("agent.lr must be a finite non-negative number");
  if (batch_size < 1) throw ConfigError("agent.batch_size must be >= 1");
  if (capacity < batch_size) throw ConfigError("agent.capacity must be >= agent.batch_size");
  if (target_sync_period < 1) throw ConfigError("agent.target_sync_period must be >= 1");
  if (!(epsilon_min > 0.0 && epsilon_min <= epsilon_start && epsilon_start <= 1.0))
    throw ConfigError("agent.epsilon_* must satisfy 0 < epsilon_min <= epsilon_start <= 1");
  if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0)) throw ConfigError("agent.epsilon_decay must be in (0, 1]");
}

std::size_t greedy_action(const QVector& q) {
  std::size_t best = 0;
  for (std::size_t a = 1; a < q.size(); ++a)
    if (q[a] > q[best]) best = a;
  return best;
}

std::size_t select_action(const QFunction& q, const FeatureVector& s, double epsilon, Rng& rng) {
  if (rng.uniform() < epsilon) return rng.index(kActionCount);
  return greedy_action(q.q_values(s));
}

double td_target(const Transition& tr, const QFunction& target_q, const QFunction& online_q, double gamma, bool double_q) {
  if (tr.done) return tr.r;
  const QVector next = target_q.q_values(tr.s_next);
  if (double_q) return tr.r + gamma * next[greedy_action(online_q.q_values(tr.s_next))];
  double best = next[0];
  for (double v : next) best = std::max(best, v);
  return tr.r + gamma * best;
}

double loss(const QFunction& q, std::span<const Transition> batch, std::span<const double> targets) {
  if (batch.empty()) throw Error(ErrorCode::InvalidArgument, "loss over an empty batch");
  if (batch.size() != targets.size()) throw Error(ErrorCode::InvalidArgument, "batch and target sizes differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double err = q.q_values(batch[i].s)[batch[i].a] - targets[i];
    acc += err * err;
  }
  return acc / static_cast<double>(batch.size());
}

GradientStepStats gradient_step(QFunction& q, std::span<const Transition> batch, std::span<const double> targets, double lr) {
  if (batch.empty()) throw Error(ErrorCode::InvalidArgument, "gradient step over an empty batch");
  if (batch.size() != targets.size()) throw Error(ErrorCode::InvalidArgument, "batch and target sizes differ");
  const std::size_t p = q.parameter_count();
  const double m = static_cast<double>(batch.size());
  std::vector<double> grad(p, 0.0), sample(p, 0.0);
  GradientStepStats stats;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double value = q.gradient(batch[i].s, batch[i].a, sample);
    const double err = value - targets[i];
    stats.loss += err * err / m;
    const double coeff = 2.0 * err / m;
    for (std::size_t k = 0; k < p; ++k) grad[k] += coeff * sample[k];
  }
  double sq = 0.0;
  for (double g : grad) sq += g * g;
  stats.grad_norm = std::sqrt(sq);
  if (!std::isfinite(stats.grad_norm) || !std::isfinite(stats.loss)) {
    std::ostringstream msg;
    msg << "non-finite gradient (loss = " << stats.loss << ", |grad| = " << stats.grad_norm << ", batch = " << batch.size()
        << ", model = " << q.architecture() << ")";
    throw TrainingError(msg.str());
  }
  if (lr == 0.0 || stats.grad_norm == 0.0) return stats;
  auto params = q.parameters();
  for (std::size_t k = 0; k < p; ++k) params[k] -= lr * grad[k];
  q.set_parameters(params);
  return stats;
}

void sync_target(const QFunction& online, QFunction& target) {
  if (online.architecture() != target.architecture())
    throw Error(ErrorCode::Architecture, "cannot sync " + online.architecture() + " into " + target.architecture());
  target.set_parameters(online.parameters());
}

std::uint64_t episode_seed(std::uint64_t base, int episode) {
  return hash64({base, kEpisodeStream, static_cast<std::uint64_t>(episode)});
}

std::uint64_t eval_episode_seed(std::uint64_t base, int episode) {
  return hash64({base, kEvalStream, static_cast<std::uint64_t>(episode)});
}

MetricsLog train(Environment& env, QFunction& online, const AgentConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  MetricsLog log;
  if (opts.episodes <= 0) return log;

  Rng rng(hash64({opts.seed, kAgentStream}));
  ReplayMemory memory(cfg.capacity);
  auto target = online.clone();
  const std::size_t gate = std::max(cfg.batch_size, cfg.warmup);
  double epsilon = cfg.epsilon_start;
  std::size_t total_steps = 0;
  std::vector<double> targets(cfg.batch_size);

  for (int ep = 0; ep < opts.episodes; ++ep) {
    const auto started = std::chrono::steady_clock::now();
    FeatureVector s = env.reset(episode_seed(opts.seed, ep));
    if (opts.on_reset) opts.on_reset(ep, s);

    MetricsRow row;
    row.episode = ep;
    row.epsilon = epsilon;
    for (;;) {
      const std::size_t a = select_action(online, s, epsilon, rng);
      const StepFeedback fb = env.step(a);
      memory.push({s, a, fb.reward, fb.next, fb.terminal});
      if (opts.on_step) opts.on_step(ep, row.steps, a, fb);

      ++row.steps;
      row.sum_r_tran += fb.r_tran;
      row.sum_r_tele += fb.r_tele;
      row.sum_total += fb.reward;
      row.collided = std::max(row.collided, fb.collision);
      row.ho_count = fb.ho_count;

      if (memory.size() >= gate) {
        const auto batch = memory.sample(cfg.batch_size, rng);
        for (std::size_t i = 0; i < batch.size(); ++i) targets[i] = td_target(batch[i], *target, online, cfg.gamma, cfg.double_q);
        gradient_step(online, batch, targets, cfg.lr);
      }
      if (++total_steps % cfg.target_sync_period == 0) sync_target(online, *target);

      s = fb.next;
      if (fb.terminal || fb.truncated) break;
    }
    if (opts.record_wallclock)
      row.wallclock_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    log.push_back(row);
    epsilon = std::max(cfg.epsilon_min, epsilon * cfg.epsilon_decay);
  }
  return log;
}

MetricsLog evaluate(Environment& env, const QFunction& q, const RunOptions& opts) {
  MetricsLog log;
  for (int ep = 0; ep < opts.episodes; ++ep) {
    const auto started = std::chrono::steady_clock::now();
    FeatureVector s = env.reset(eval_episode_seed(opts.seed, ep));
    if (opts.on_reset) opts.on_reset(ep, s);
    MetricsRow row;
    row.episode = ep;
    for (;;) {
      const std::size_t a = greedy_action(q.q_values(s));
      const StepFeedback fb = env.step(a);
      if (opts.on_step) opts.on_step(ep, row.steps, a, fb);
      ++row.steps;
      row.sum_r_tran += fb.r_tran;
      row.sum_r_tele += fb.r_tele;
      row.sum_total += fb.reward;
      row.collided = std::max(row.collided, fb.collision);
      row.ho_count = fb.ho_count;
      s = fb.next;
      if (fb.terminal || fb.truncated) break;
    }
    if (opts.record_wallclock)
      row.wallclock_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    log.push_back(row);
  }
  return log;
}

void write_metrics_csv(std::ostream& out, const MetricsLog& log) {
  CsvWriter w(out);
  w.write_row({"episode", "steps", "sum_r_tran", "sum_r_tele", "sum_total", "collided", "ho_count", "epsilon", "wallclock_ms"});
  for (const auto& r : log) {
    w.write_row({std::to_string(r.episode), std::to_string(r.steps), format_double(r.sum_r_tran), format_double(r.sum_r_tele),
                 format_double(r.sum_total), std::to_string(r.collided), std::to_string(r.ho_count), format_double(r.epsilon),
                 format_double(r.wallclock_ms)});
  }
}

MetricsLog read_metrics_csv(const std::string& text) {
  const auto rows = parse_csv(text);
  if (rows.empty() || rows.front().size() != 9 || rows.front()[0] != "episode")
    throw Error(ErrorCode::Io, "not a metrics CSV");
  MetricsLog log;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() != 9) throw Error(ErrorCode::Io, "metrics row " + std::to_string(i) + " has " + std::to_string(f.size()) + " fields");
    MetricsRow r;
    r.episode = std::stoi(f[0]);
    r.steps = std::stoi(f[1]);
    r.sum_r_tran = std::stod(f[2]);
    r.sum_r_tele = std::stod(f[3]);
    r.sum_total = std::stod(f[4]);
    r.collided = std::stoi(f[5]);
    r.ho_count = std::stoi(f[6]);
    r.epsilon = std::stod(f[7]);
    r.wallclock_ms = std::stod(f[8]);
    log.push_back(r);
  }
  return log;
}

}  // namespace vqmorl::learn
