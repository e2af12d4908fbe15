#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "common/error.hpp"

namespace vqmorl::quantum {

using cplx = std::complex<double>;

enum class GateKind { RX, RY, RZ, CZ };

/// One gate of the restricted set. `param_index` names the trainable angle
/// that drives a variational rotation (-1 for encoding rotations and CZ).
struct GateSpec {
  GateKind kind = GateKind::RX;
  int target = 0;
  std::optional<int> control;
  double angle = 0.0;
  int param_index = -1;

  static GateSpec rx(int q, double a) { return {GateKind::RX, q, std::nullopt, a, -1}; }
  static GateSpec ry(int q, double a) { return {GateKind::RY, q, std::nullopt, a, -1}; }
  static GateSpec rz(int q, double a) { return {GateKind::RZ, q, std::nullopt, a, -1}; }
  static GateSpec cz(int c, int t) { return {GateKind::CZ, t, c, 0.0, -1}; }
};

class InvalidGate : public Error {
 public:
  explicit InvalidGate(const std::string& what) : Error(ErrorCode::InvalidGate, what) {}
};

/// Z-only Pauli product, stored as a bit mask over qubits.
class PauliProduct {
 public:
  PauliProduct(std::initializer_list<int> support, int qubits);
  static PauliProduct from_mask(std::uint32_t mask, int qubits);

  std::uint32_t mask() const noexcept { return mask_; }
  bool operator==(const PauliProduct&) const = default;

 private:
  explicit PauliProduct(std::uint32_t mask) : mask_(mask) {}
  std::uint32_t mask_;
};

/// Dense n-qubit register. Basis index b is little-endian: bit q of b is the
/// state of qubit q.
class Statevector {
 public:
  explicit Statevector(int qubits);

  /// Normalizes `amplitudes`; the length must be a power of two.
  static Statevector from_amplitudes(std::vector<cplx> amplitudes);

  int qubits() const noexcept { return qubits_; }
  std::span<const cplx> amplitudes() const noexcept { return amps_; }
  double norm() const;

  void apply(const GateSpec& gate);
  void apply_all(std::span<const GateSpec> gates);

 private:
  void check(const GateSpec& gate) const;

  int qubits_;
  std::vector<cplx> amps_;
};

Statevector apply_gate(Statevector state, const GateSpec& gate);

/// <psi| Z_S |psi> = sum_b |amp_b|^2 (-1)^{popcount(b & S)}.
double expectation(const Statevector& state, const PauliProduct& obs);

}  // namespace vqmorl::quantum
