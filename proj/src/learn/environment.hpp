#pragma once

#include <cstdint>

#include "common/features.hpp"

namespace vqmorl::learn {

struct StepFeedback {
  FeatureVector next;
  double reward = 0.0;     // scalarized
  bool terminal = false;   // no bootstrapping past this transition
  bool truncated = false;  // episode ended without a terminal state
  double r_tran = 0.0;
  double r_tele = 0.0;
  int collision = 0;
  int ho_count = 0;
};

/// Episodic environment over the 15 flat actions, as seen by the learner.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual FeatureVector reset(std::uint64_t seed) = 0;
  virtual StepFeedback step(std::size_t action) = 0;
};

}  // namespace vqmorl::learn
