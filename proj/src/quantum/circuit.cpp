#include "quantum/circuit.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace vqmorl::quantum {

VqcParams::VqcParams(int layers_) : layers(layers_), qubits(kQubits) {
  if (layers < 1) throw Error(ErrorCode::InvalidArgument, "circuit needs at least one layer");
  theta.assign(static_cast<std::size_t>(layers) * qubits * kRotationsPerQubit, 0.0);
  action_weights.assign(kActionCount, 1.0);
}

void VqcParams::validate() const {
  if (layers < 1 || qubits != kQubits) throw Error(ErrorCode::Architecture, "circuit shape must be layers >= 1 on 5 qubits");
  if (theta.size() != static_cast<std::size_t>(layers) * qubits * kRotationsPerQubit)
    throw Error(ErrorCode::Architecture, "theta has " + std::to_string(theta.size()) + " entries, shape requires " +
                                             std::to_string(layers * qubits * kRotationsPerQubit));
  if (action_weights.size() != kActionCount) throw Error(ErrorCode::Architecture, "expected 15 action weights");
  for (double t : theta)
    if (!std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "non-finite rotation angle");
  for (double w : action_weights)
    if (!std::isfinite(w)) throw Error(ErrorCode::InvalidArgument, "non-finite action weight");
}

std::vector<GateSpec> build_circuit(const VqcParams& params, const FeatureVector& features) {
  for (std::size_t q = 0; q < kFeatureCount; ++q) {
    if (!(features[q] >= -1.0 && features[q] <= 1.0))
      throw EncodingRangeError("feature " + std::to_string(q) + " = " + std::to_string(features[q]) + " outside [-1, 1]");
  }
  const int n = params.qubits;
  std::vector<GateSpec> gates;
  gates.reserve(static_cast<std::size_t>(params.layers) * n * 4);
  for (int l = 0; l < params.layers; ++l) {
    for (int q = 0; q < n; ++q) gates.push_back(GateSpec::rx(q, std::numbers::pi * features[q]));
    for (int q = 0; q < n; ++q) {
      for (int r = 0; r < kRotationsPerQubit; ++r) {
        const auto idx = params.theta_index(l, q, r);
        GateSpec g = r == 0 ? GateSpec::ry(q, params.theta[idx]) : GateSpec::rz(q, params.theta[idx]);
        g.param_index = static_cast<int>(idx);
        gates.push_back(g);
      }
    }
    for (int q = 0; q < n; ++q) gates.push_back(GateSpec::cz(q, (q + 1) % n));
  }
  return gates;
}

Statevector run_circuit(std::span<const GateSpec> gates, int qubits) {
  Statevector s(qubits);
  s.apply_all(gates);
  return s;
}

}  // namespace vqmorl::quantum
