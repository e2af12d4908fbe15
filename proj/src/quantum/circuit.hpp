#pragma once

#include <vector>

#include "common/features.hpp"
#include "quantum/statevector.hpp"

namespace vqmorl::quantum {

inline constexpr int kQubits = 5;
inline constexpr int kDefaultLayers = 3;
inline constexpr int kRotationsPerQubit = 2;

class EncodingRangeError : public Error {
 public:
  explicit EncodingRangeError(const std::string& what) : Error(ErrorCode::EncodingRange, what) {}
};

/// Trainable parameters of the Q-circuit: rotation angles indexed
/// (layer, qubit, rotation) row-major, plus one output scale per action.
struct VqcParams {
  int layers = kDefaultLayers;
  int qubits = kQubits;
  std::vector<double> theta;
  std::vector<double> action_weights;

  VqcParams() : VqcParams(kDefaultLayers) {}
  explicit VqcParams(int layers);

  std::size_t theta_index(int layer, int qubit, int rotation) const {
    return (static_cast<std::size_t>(layer) * qubits + qubit) * kRotationsPerQubit + rotation;
  }
  double& angle(int layer, int qubit, int rotation) { return theta[theta_index(layer, qubit, rotation)]; }
  double angle(int layer, int qubit, int rotation) const { return theta[theta_index(layer, qubit, rotation)]; }

  /// Throws if the shape is inconsistent or any entry is non-finite.
  void validate() const;
  bool operator==(const VqcParams&) const = default;
};

/// Per layer: RX(pi f_q) on every qubit, then RY(theta[l][q][0]) RZ(theta[l][q][1])
/// on every qubit, then CZ around the ring (0,1),(1,2),...,(n-1,0).
std::vector<GateSpec> build_circuit(const VqcParams& params, const FeatureVector& features);

/// Runs `gates` on |0...0>.
Statevector run_circuit(std::span<const GateSpec> gates, int qubits);

}  // namespace vqmorl::quantum
