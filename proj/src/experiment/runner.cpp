#include "experiment/runner.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "common/csv.hpp"
#include "common/rng.hpp"
#include "env/momdp_env.hpp"

namespace vqmorl::experiment {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kInitStream = 0x696e6974ULL;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create directory '" + dir.string() + "': " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  auto out = open_out(path);
  out << content;
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> step_header() {
  return {"t", "flat_action", "r_tran", "r_tele", "total", "rate_bps", "xi", "delta", "lane", "v_ego"};
}

std::vector<std::string> step_fields(int t, std::size_t action, const env::MomdpEnv& env) {
  const auto& r = env.last_reward();
  const auto& info = env.last_info();
  const auto& ego = env.world().vehicles[env.world().ego_index()];
  return {std::to_string(t),          std::to_string(action),        format_double(r.r_tran),
          format_double(r.r_tele),    format_double(r.total),        format_double(info.rate),
          format_double(info.xi),     std::to_string(info.collision), std::to_string(ego.lane),
          format_double(ego.v)};
}

std::string features_row_header() { return "episode,f0,f1,f2,f3,f4\n"; }

void write_features(std::ostream& out, int episode, const FeatureVector& f) {
  std::vector<std::string> row{std::to_string(episode)};
  for (double v : f.values) row.push_back(format_double(v));
  CsvWriter(out).write_row(row);
}

double mean(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return xs.empty() ? 0.0 : acc / static_cast<double>(xs.size());
}

double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

}  // namespace

std::string resolve_output_dir(const std::string& dir) {
  const char* root = std::getenv("VQMORL_OUTPUT_ROOT");
  const fs::path p(dir);
  if (root && *root && p.is_relative()) return (fs::path(root) / p).string();
  return dir;
}

std::unique_ptr<learn::QFunction> make_model(const TrainConfig& config) {
  Rng rng(hash64({config.seed, kInitStream}));
  if (config.backend == Backend::Vqc)
    return std::make_unique<learn::VqcQ>(quantum::init_params(config.vqc.layers, config.vqc.init, config.vqc.init_scale, rng));
  return std::make_unique<learn::NeuralQ>(config.neural.hidden, rng);
}

namespace {

TrainResult train_impl(const TrainConfig& config, const RunFlags& flags, std::ostream* steps_out) {
  config.validate();
  TrainResult result;
  result.model = make_model(config);
  env::MomdpEnv environment(config.env);

  learn::RunOptions opts;
  opts.episodes = config.episodes;
  opts.seed = config.seed;
  opts.record_wallclock = flags.record_wallclock;
  opts.on_reset = [&](int, const FeatureVector& f) { result.initial_observations.push_back(f); };
  if (steps_out) {
    auto header = step_header();
    header.insert(header.begin(), "episode");
    CsvWriter(*steps_out).write_row(header);
    opts.on_step = [&](int ep, int t, std::size_t a, const learn::StepFeedback&) {
      auto row = step_fields(t, a, environment);
      row.insert(row.begin(), std::to_string(ep));
      CsvWriter(*steps_out).write_row(row);
    };
  }
  result.metrics = learn::train(environment, *result.model, config.agent, opts);
  return result;
}

}  // namespace

TrainResult train_model(const TrainConfig& config, const RunFlags& flags) {
  TrainConfig resolved = config;
  resolved.resolve();
  return train_impl(resolved, flags, nullptr);
}

TrainResult run_train(TrainConfig config, const std::string& out_dir, const RunFlags& flags) {
  config.resolve();
  config.validate();
  const fs::path dir = resolve_output_dir(out_dir.empty() ? config.output_dir : out_dir);
  ensure_dir(dir);
  config.output_dir = dir.string();
  write_file(dir / "config.json", to_json(config));

  std::ofstream steps;
  if (flags.trace) steps = open_out(dir / "steps.csv");
  TrainResult result = train_impl(config, flags, flags.trace ? &steps : nullptr);

  {
    auto out = open_out(dir / "metrics.csv");
    learn::write_metrics_csv(out, result.metrics);
  }
  {
    auto out = open_out(dir / "initial_observations.csv");
    out << features_row_header();
    for (std::size_t ep = 0; ep < result.initial_observations.size(); ++ep)
      write_features(out, static_cast<int>(ep), result.initial_observations[ep]);
  }
  write_file(dir / "checkpoint.json", result.model->to_checkpoint());
  return result;
}

learn::MetricsLog evaluate_model(const TrainConfig& config, const learn::QFunction& model, int episodes,
                                 const std::string& out_dir, const RunFlags& flags) {
  TrainConfig resolved = config;
  resolved.resolve();
  resolved.validate();
  env::MomdpEnv environment(resolved.env);

  learn::RunOptions opts;
  opts.episodes = episodes > 0 ? episodes : resolved.eval_episodes;
  opts.seed = resolved.seed;
  opts.record_wallclock = flags.record_wallclock;

  fs::path dir;
  std::ofstream traffic_out, network_out, steps_out;
  if (!out_dir.empty()) {
    dir = resolve_output_dir(out_dir);
    ensure_dir(dir);
    resolved.output_dir = dir.string();
    write_file(dir / "config.json", to_json(resolved));
    if (flags.trace) {
      ensure_dir(dir / "traces");
      const double policy_dt = resolved.env.road.dt * resolved.env.road.action_repeat;
      opts.on_reset = [&](int ep, const FeatureVector&) {
        std::ostringstream stem;
        stem << "episode_" << std::setw(4) << std::setfill('0') << ep;
        traffic_out = open_out(dir / "traces" / (stem.str() + "_traffic.csv"));
        network_out = open_out(dir / "traces" / (stem.str() + "_network.csv"));
        steps_out = open_out(dir / "traces" / (stem.str() + "_steps.csv"));
        traffic::write_traffic_trace_header(traffic_out);
        radio::write_network_trace_header(network_out);
        CsvWriter(steps_out).write_row(step_header());
        traffic::write_traffic_trace(traffic_out, environment.world(), 0.0);
        radio::write_network_trace(network_out, environment.world(), 0.0);
      };
      opts.on_step = [&, policy_dt](int, int t, std::size_t a, const learn::StepFeedback&) {
        const double time_s = (t + 1) * policy_dt;
        traffic::write_traffic_trace(traffic_out, environment.world(), time_s);
        radio::write_network_trace(network_out, environment.world(), time_s);
        CsvWriter(steps_out).write_row(step_fields(t, a, environment));
      };
    }
  }

  auto log = learn::evaluate(environment, model, opts);
  if (!out_dir.empty()) {
    auto out = open_out(dir / "eval.csv");
    learn::write_metrics_csv(out, log);
  }
  return log;
}

learn::MetricsLog run_eval(TrainConfig config, const std::string& checkpoint, int episodes, const std::string& out_dir,
                           const RunFlags& flags) {
  config.resolve();
  config.validate();
  const auto model = learn::load_checkpoint(read_file(checkpoint));
  const auto expected = make_model(config);
  if (model->architecture() != expected->architecture())
    throw Error(ErrorCode::Architecture, "checkpoint architecture " + model->architecture() + " does not match configured backend " +
                                             expected->architecture());
  return evaluate_model(config, *model, episodes, out_dir.empty() ? config.output_dir : out_dir, flags);
}

void SweepSpec::validate() const {
  if (parameter != "n_background" && parameter != "desired_velocity")
    throw ConfigError("sweep parameter must be n_background or desired_velocity, got '" + parameter + "'");
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  if (repetitions < 1) throw ConfigError("sweep repetitions must be >= 1");
  for (double v : values) {
    if (!std::isfinite(v)) throw ConfigError("sweep values must be finite");
    if (parameter == "n_background" && (v < 0 || v != std::floor(v)))
      throw ConfigError("n_background sweep values must be non-negative integers");
  }
}

std::uint64_t sweep_seed(std::uint64_t base, std::size_t value_index, int repetition) {
  return hash64({base, static_cast<std::uint64_t>(value_index), static_cast<std::uint64_t>(repetition)});
}

RunSummary summarize(const learn::MetricsLog& eval_log) {
  RunSummary s;
  std::vector<double> tran, tele, total, coll, ho;
  for (const auto& r : eval_log) {
    tran.push_back(r.sum_r_tran);
    tele.push_back(r.sum_r_tele);
    total.push_back(r.sum_total);
    coll.push_back(r.collided);
    ho.push_back(r.ho_count);
  }
  s.ok = true;
  s.mean_r_tran = mean(tran);
  s.mean_r_tele = mean(tele);
  s.mean_total = mean(total);
  s.collision_rate = mean(coll);
  s.mean_ho_count = mean(ho);
  return s;
}

std::vector<AggregateRow> aggregate(const std::vector<RunSummary>& runs, const std::vector<double>& values) {
  std::vector<AggregateRow> rows;
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    AggregateRow row;
    row.value = values[vi];
    std::vector<double> tran, tele, total, coll, ho;
    for (const auto& r : runs) {
      if (r.value_index != vi) continue;
      ++row.runs;
      if (!r.ok) {
        ++row.failed;
        continue;
      }
      tran.push_back(r.mean_r_tran);
      tele.push_back(r.mean_r_tele);
      total.push_back(r.mean_total);
      coll.push_back(r.collision_rate);
      ho.push_back(r.mean_ho_count);
    }
    row.mean_r_tran = mean(tran);
    row.std_r_tran = sample_std(tran);
    row.mean_r_tele = mean(tele);
    row.std_r_tele = sample_std(tele);
    row.mean_total = mean(total);
    row.std_total = sample_std(total);
    row.mean_collision_rate = mean(coll);
    row.std_collision_rate = sample_std(coll);
    row.mean_ho_count = mean(ho);
    if (rows.empty())
      row.r_tele_trend = "baseline";
    else
      row.r_tele_trend = row.mean_r_tele <= rows.back().mean_r_tele ? "non-increasing" : "increase";
    rows.push_back(row);
  }
  return rows;
}

SweepResult run_sweep(const TrainConfig& base_in, const SweepSpec& spec, const std::string& out_dir, const RunFlags& flags) {
  spec.validate();
  TrainConfig base = base_in;
  base.resolve();
  base.validate();
  const fs::path dir = resolve_output_dir(out_dir.empty() ? base.output_dir : out_dir);
  ensure_dir(dir);
  base.output_dir = dir.string();
  write_file(dir / "config.json", to_json(base));
  {
    nlohmann::ordered_json doc;
    doc["parameter"] = spec.parameter;
    doc["values"] = spec.values;
    doc["repetitions"] = spec.repetitions;
    doc["vary_seed"] = spec.vary_seed;
    write_file(dir / "sweep.json", doc.dump(2) + "\n");
  }

  SweepResult result;
  for (std::size_t vi = 0; vi < spec.values.size(); ++vi) {
    for (int rep = 0; rep < spec.repetitions; ++rep) {
      RunSummary summary;
      TrainConfig cfg = base;
      cfg.seed = spec.vary_seed ? sweep_seed(base.seed, vi, rep) : base.seed;
      const double value = spec.values[vi];
      const fs::path run_dir = dir / "runs" / ("v" + std::to_string(vi) + "_r" + std::to_string(rep));
      try {
        if (spec.parameter == "n_background")
          cfg.env.env.n_background = static_cast<int>(value);
        else
          cfg.env.env.desired_velocity = value;
        cfg.output_dir = run_dir.string();
        auto trained = run_train(cfg, run_dir.string(), flags);
        const auto log = evaluate_model(cfg, *trained.model, cfg.eval_episodes, run_dir.string(), flags);
        summary = summarize(log);
      } catch (const std::exception& e) {
        summary = RunSummary{};
        summary.ok = false;
        summary.error = e.what();
      }
      summary.value_index = vi;
      summary.value = value;
      summary.repetition = rep;
      summary.seed = cfg.seed;
      result.runs.push_back(summary);
    }
  }
  result.aggregate = aggregate(result.runs, spec.values);

  {
    auto out = open_out(dir / "runs.csv");
    CsvWriter w(out);
    w.write_row({"value_index", "value", "repetition", "seed", "status", "mean_r_tran", "mean_r_tele", "mean_total",
                 "collision_rate", "mean_ho_count"});
    for (const auto& r : result.runs) {
      w.write_row({std::to_string(r.value_index), format_double(r.value), std::to_string(r.repetition), std::to_string(r.seed),
                   r.ok ? "ok" : "error: " + r.error, format_double(r.mean_r_tran), format_double(r.mean_r_tele),
                   format_double(r.mean_total), format_double(r.collision_rate), format_double(r.mean_ho_count)});
    }
  }
  {
    auto out = open_out(dir / "aggregate.csv");
    CsvWriter w(out);
    w.write_row({"parameter", "value", "runs", "failed", "mean_r_tran", "std_r_tran", "mean_r_tele", "std_r_tele", "mean_total",
                 "std_total", "mean_collision_rate", "std_collision_rate", "mean_ho_count", "r_tele_trend"});
    for (const auto& a : result.aggregate) {
      w.write_row({spec.parameter, format_double(a.value), std::to_string(a.runs), std::to_string(a.failed),
                   format_double(a.mean_r_tran), format_double(a.std_r_tran), format_double(a.mean_r_tele),
                   format_double(a.std_r_tele), format_double(a.mean_total), format_double(a.std_total),
                   format_double(a.mean_collision_rate), format_double(a.std_collision_rate), format_double(a.mean_ho_count),
                   a.r_tele_trend});
    }
  }
  return result;
}

}  // namespace vqmorl::experiment
