#pragma once

#include <array>
#include <string>

#include "common/rng.hpp"
#include "quantum/circuit.hpp"

namespace vqmorl::quantum {

/// Observable assigned to each action: 0-4 single Z_q, 5-9 ring pairs
/// Z_q Z_{q+1}, 10-14 ring triples Z_q Z_{q+1} Z_{q+2} (indices mod 5).
const std::array<PauliProduct, kActionCount>& action_observables();

enum class InitScheme { Uniform, Zero };

/// theta ~ U(-scale, scale) for Uniform, 0 for Zero; weights start at 1.
VqcParams init_params(int layers, InitScheme scheme, double scale, Rng& rng);

/// Raw expectations <O_a> for all actions (no output scaling).
QVector expectations(const VqcParams& params, const FeatureVector& features);

/// Q[a] = w_a <O_a>.
QVector q_values(const VqcParams& params, const FeatureVector& features);

struct VqcGradient {
  std::vector<double> theta;  // dQ[a]/dtheta_k, same layout as VqcParams::theta
  double weight = 0.0;        // dQ[a]/dw_a
  double value = 0.0;         // Q[a] at the unshifted point
};

/// Exact derivative of Q[action] via the two-term shift rule
/// (f(theta + pi/2) - f(theta - pi/2)) / 2 per rotation angle.
VqcGradient parameter_shift_grad(const VqcParams& params, const FeatureVector& features, std::size_t action);

std::string to_checkpoint_json(const VqcParams& params);
VqcParams from_checkpoint_json(const std::string& text);

}  // namespace vqmorl::quantum
