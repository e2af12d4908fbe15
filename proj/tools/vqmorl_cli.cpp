// vqmorl command line: train / eval / sweep / validate-config.
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vqmorl/vqmorl.h"

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> backend;
  std::optional<int> episodes;
  std::optional<std::string> out;
  bool trace = false;
  bool wallclock = false;
};

int report(vqm_status s) {
  std::fprintf(stderr, "vqmorl: %s: %s\n", vqm_status_name(s), vqm_last_error());
  return 1;
}

struct ConfigHandle {
  vqm_config* ptr = nullptr;
  ~ConfigHandle() { vqm_config_destroy(ptr); }
};

void add_common(CLI::App* cmd, Common& c, bool with_episodes = true) {
  cmd->add_option("--config", c.config_path, "JSON config file (defaults if omitted)");
  cmd->add_option("--seed", c.seed, "base seed");
  cmd->add_option("--backend", c.backend, "Q-function backend")->check(CLI::IsMember({"vqc", "neural"}));
  if (with_episodes) cmd->add_option("--episodes", c.episodes, "training episodes")->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "output directory (relative paths go under $VQMORL_OUTPUT_ROOT)");
}

void add_run_flags(CLI::App* cmd, Common& c) {
  cmd->add_flag("--trace", c.trace, "write per-step logs and traces");
  cmd->add_flag("--wallclock", c.wallclock, "record wall-clock time per episode (breaks byte-reproducibility)");
}

// config file plus command-line overrides
vqm_status load(const Common& c, ConfigHandle& h) {
  vqm_status s = c.config_path.empty() ? vqm_config_default(&h.ptr) : vqm_config_load(c.config_path.c_str(), &h.ptr);
  if (s != VQM_OK) return s;
  if (c.seed && (s = vqm_config_set_seed(h.ptr, *c.seed)) != VQM_OK) return s;
  if (c.backend && (s = vqm_config_set_backend(h.ptr, c.backend->c_str())) != VQM_OK) return s;
  if (c.episodes && (s = vqm_config_set_episodes(h.ptr, *c.episodes)) != VQM_OK) return s;
  if (c.out && (s = vqm_config_set_output_dir(h.ptr, c.out->c_str())) != VQM_OK) return s;
  return vqm_config_validate(h.ptr);
}

uint32_t flags_of(const Common& c) {
  return (c.trace ? VQM_FLAG_TRACE : 0u) | (c.wallclock ? VQM_FLAG_WALLCLOCK : 0u);
}

std::string output_dir(const ConfigHandle& h) {
  size_t needed = 0;
  vqm_config_output_dir(h.ptr, nullptr, 0, &needed);
  std::string buf(needed, '\0');
  vqm_config_output_dir(h.ptr, buf.data(), buf.size(), &needed);
  buf.resize(needed ? needed - 1 : 0);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum multi-objective RL for joint driving and network selection"};
  app.set_version_flag("--version", std::string(vqm_version()));
  app.require_subcommand(1);

  Common train_opts;
  auto* train = app.add_subcommand("train", "train a Q-function and write metrics.csv + checkpoint.json");
  add_common(train, train_opts);
  add_run_flags(train, train_opts);

  Common eval_opts;
  std::string checkpoint;
  std::optional<int> eval_episodes;
  auto* eval = app.add_subcommand("eval", "greedy evaluation of a checkpoint, writes eval.csv");
  add_common(eval, eval_opts, false);
  eval->add_option("--checkpoint", checkpoint, "checkpoint.json from a train run")->required()->check(CLI::ExistingFile);
  eval->add_option("--episodes", eval_episodes, "evaluation episodes (default: eval_episodes from config)")
      ->check(CLI::PositiveNumber);
  add_run_flags(eval, eval_opts);

  Common sweep_opts;
  std::string param = "n_background";
  std::vector<double> values;
  int reps = 1;
  std::optional<int> sweep_eval_episodes;
  bool fixed_seed = false;
  auto* sweep = app.add_subcommand("sweep", "train + evaluate over a parameter grid, writes aggregate.csv");
  add_common(sweep, sweep_opts);
  sweep->add_option("--param", param, "swept parameter")->check(CLI::IsMember({"n_background", "desired_velocity"}));
  sweep->add_option("--values", values, "comma separated values")->required()->delimiter(',');
  sweep->add_option("--reps", reps, "repetitions per value")->check(CLI::PositiveNumber);
  sweep->add_option("--eval-episodes", sweep_eval_episodes, "greedy evaluation episodes per run")
      ->check(CLI::PositiveNumber);
  sweep->add_flag("--fixed-seed", fixed_seed, "reuse the base seed for every repetition");
  add_run_flags(sweep, sweep_opts);

  Common check_opts;
  auto* check = app.add_subcommand("validate-config", "validate a config and print it fully resolved");
  add_common(check, check_opts);

  CLI11_PARSE(app, argc, argv);

  ConfigHandle h;
  vqm_status s = VQM_OK;

  if (*train) {
    if ((s = load(train_opts, h)) != VQM_OK) return report(s);
    if ((s = vqm_train(h.ptr, nullptr, flags_of(train_opts))) != VQM_OK) return report(s);
    std::printf("%s\n", output_dir(h).c_str());
  } else if (*eval) {
    if ((s = load(eval_opts, h)) != VQM_OK) return report(s);
    if ((s = vqm_eval(h.ptr, checkpoint.c_str(), eval_episodes.value_or(0), nullptr, flags_of(eval_opts))) != VQM_OK)
      return report(s);
    std::printf("%s\n", output_dir(h).c_str());
  } else if (*sweep) {
    if ((s = load(sweep_opts, h)) != VQM_OK) return report(s);
    if (sweep_eval_episodes && (s = vqm_config_set_eval_episodes(h.ptr, *sweep_eval_episodes)) != VQM_OK)
      return report(s);
    uint32_t flags = flags_of(sweep_opts) | (fixed_seed ? VQM_FLAG_FIXED_SEED : 0u);
    if ((s = vqm_sweep(h.ptr, param.c_str(), values.data(), values.size(), reps, nullptr, flags)) != VQM_OK)
      return report(s);
    std::printf("%s\n", output_dir(h).c_str());
  } else if (*check) {
    if ((s = load(check_opts, h)) != VQM_OK) return report(s);
    size_t needed = 0;
    vqm_config_to_json(h.ptr, nullptr, 0, &needed);
    std::string buf(needed, '\0');
    if ((s = vqm_config_to_json(h.ptr, buf.data(), buf.size(), &needed)) != VQM_OK) return report(s);
    std::printf("%s\n", buf.c_str());
  }
  return 0;
}
