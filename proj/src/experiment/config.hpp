#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "env/momdp_env.hpp"
#include "learn/agent.hpp"
#include "quantum/vqc.hpp"

namespace vqmorl::experiment {

enum class Backend { Vqc, Neural };

Backend backend_from_string(const std::string& name);
std::string to_string(Backend backend);

struct VqcConfig {
  int layers = quantum::kDefaultLayers;
  quantum::InitScheme init = quantum::InitScheme::Uniform;
  double init_scale = 0.1;
  bool operator==(const VqcConfig&) const = default;
};

struct NeuralConfig {
  std::vector<int> hidden{64, 64};
  bool operator==(const NeuralConfig&) const = default;
};

inline constexpr double kDefaultVqcLr = 1e-3;
inline constexpr double kDefaultNeuralLr = 5e-4;

/// Fully-specified run configuration. A freshly parsed config may leave
/// `agent.lr` unset (NaN); resolve() fills it from the backend default.
struct TrainConfig {
  env::EnvSettings env;
  learn::AgentConfig agent;
  VqcConfig vqc;
  NeuralConfig neural;
  Backend backend = Backend::Vqc;
  int episodes = 200;
  int eval_episodes = 10;
  std::uint64_t seed = 0;
  std::string output_dir = "runs/default";

  TrainConfig();
  void resolve();
  /// Throws ConfigError naming the offending key.
  void validate() const;
  bool operator==(const TrainConfig& other) const;
};

/// Parses a JSON document. Missing keys take defaults; unknown keys and type
/// mismatches are rejected. An empty or whitespace-only text is `{}`.
TrainConfig parse_config(const std::string& text);
TrainConfig load_config(const std::string& path);

/// Resolved configuration as JSON, listing every key.
std::string to_json(const TrainConfig& config);

}  // namespace vqmorl::experiment
