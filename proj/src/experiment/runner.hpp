#pragma once

#include <memory>
#include <string>
#include <vector>

#include "experiment/config.hpp"
#include "learn/agent.hpp"

namespace vqmorl::experiment {

struct RunFlags {
  bool record_wallclock = false;  // fills wallclock_ms; output is then not reproducible
  bool trace = false;             // per-step logs and, for eval, traffic/network traces
};

/// Output directory after applying the VQMORL_OUTPUT_ROOT override to
/// relative paths.
std::string resolve_output_dir(const std::string& dir);

/// Fresh Q-function for the configured backend, initialized from the run seed.
std::unique_ptr<learn::QFunction> make_model(const TrainConfig& config);

struct TrainResult {
  learn::MetricsLog metrics;
  std::unique_ptr<learn::QFunction> model;
  std::vector<FeatureVector> initial_observations;  // one per episode
};

/// Trains in memory without touching the filesystem.
TrainResult train_model(const TrainConfig& config, const RunFlags& flags = {});

/// Writes config.json, metrics.csv, initial_observations.csv, checkpoint.json
/// (and steps.csv with flags.trace) into `out_dir`.
TrainResult run_train(TrainConfig config, const std::string& out_dir, const RunFlags& flags = {});

/// Greedy evaluation of `model`. Writes config.json and eval.csv (plus
/// per-episode traces with flags.trace) when `out_dir` is non-empty.
learn::MetricsLog evaluate_model(const TrainConfig& config, const learn::QFunction& model, int episodes,
                                 const std::string& out_dir, const RunFlags& flags = {});

/// Loads `checkpoint`, checks it matches the configured backend, evaluates.
learn::MetricsLog run_eval(TrainConfig config, const std::string& checkpoint, int episodes, const std::string& out_dir,
                           const RunFlags& flags = {});

struct SweepSpec {
  std::string parameter;  // "n_background" or "desired_velocity"
  std::vector<double> values;
  int repetitions = 1;
  bool vary_seed = true;  // false: every repetition reuses the base seed

  void validate() const;
};

struct RunSummary {
  std::size_t value_index = 0;
  double value = 0.0;
  int repetition = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double mean_r_tran = 0.0;
  double mean_r_tele = 0.0;
  double mean_total = 0.0;
  double collision_rate = 0.0;
  double mean_ho_count = 0.0;
};

struct AggregateRow {
  double value = 0.0;
  int runs = 0;
  int failed = 0;
  double mean_r_tran = 0.0, std_r_tran = 0.0;
  double mean_r_tele = 0.0, std_r_tele = 0.0;
  double mean_total = 0.0, std_total = 0.0;
  double mean_collision_rate = 0.0, std_collision_rate = 0.0;
  double mean_ho_count = 0.0;
  std::string r_tele_trend;
};

struct SweepResult {
  std::vector<RunSummary> runs;
  std::vector<AggregateRow> aggregate;
};

/// Child seed of a sweep run: hash64(base, value_index, repetition).
std::uint64_t sweep_seed(std::uint64_t base, std::size_t value_index, int repetition);

/// Reduces one evaluation log to per-episode means.
RunSummary summarize(const learn::MetricsLog& eval_log);

/// Aggregates summaries (grouped by value index, in order) into rows.
std::vector<AggregateRow> aggregate(const std::vector<RunSummary>& runs, const std::vector<double>& values);

/// Train + greedy eval for every (value, repetition). Per-run outputs live in
/// out_dir/runs/v<i>_r<j>/; runs.csv and aggregate.csv at the top. A failing
/// run is recorded and the sweep continues.
SweepResult run_sweep(const TrainConfig& base, const SweepSpec& spec, const std::string& out_dir, const RunFlags& flags = {});

}  // namespace vqmorl::experiment
