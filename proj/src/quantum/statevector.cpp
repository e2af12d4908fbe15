#include "quantum/statevector.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace vqmorl::quantum {

PauliProduct::PauliProduct(std::initializer_list<int> support, int qubits) : mask_(0) {
  if (support.size() == 0) throw Error(ErrorCode::InvalidArgument, "Pauli product needs a non-empty support");
  for (int q : support) {
    if (q < 0 || q >= qubits) throw Error(ErrorCode::InvalidArgument, "Pauli support index out of range: " + std::to_string(q));
    mask_ |= 1u << q;
  }
}

PauliProduct PauliProduct::from_mask(std::uint32_t mask, int qubits) {
  if (mask == 0 || (qubits < 32 && (mask >> qubits) != 0))
    throw Error(ErrorCode::InvalidArgument, "Pauli mask outside the register");
  return PauliProduct(mask);
}

Statevector::Statevector(int qubits) : qubits_(qubits) {
  if (qubits < 1 || qubits > 24) throw Error(ErrorCode::InvalidArgument, "unsupported qubit count");
  amps_.assign(std::size_t{1} << qubits, cplx{0.0, 0.0});
  amps_[0] = 1.0;
}

Statevector Statevector::from_amplitudes(std::vector<cplx> amplitudes) {
  const std::size_t n = amplitudes.size();
  if (n < 2 || !std::has_single_bit(n)) throw Error(ErrorCode::InvalidArgument, "amplitude count must be a power of two");
  double sq = 0.0;
  for (const auto& a : amplitudes) sq += std::norm(a);
  if (!(sq > 0.0) || !std::isfinite(sq)) throw Error(ErrorCode::InvalidArgument, "amplitudes must have a finite non-zero norm");
  const double inv = 1.0 / std::sqrt(sq);
  for (auto& a : amplitudes) a *= inv;
  Statevector s(std::countr_zero(n));
  s.amps_ = std::move(amplitudes);
  return s;
}

double Statevector::norm() const {
  double sq = 0.0;
  for (const auto& a : amps_) sq += std::norm(a);
  return std::sqrt(sq);
}

void Statevector::check(const GateSpec& gate) const {
  if (gate.target < 0 || gate.target >= qubits_)
    throw InvalidGate("gate target " + std::to_string(gate.target) + " outside [0, " + std::to_string(qubits_) + ")");
  if (gate.kind == GateKind::CZ) {
    if (!gate.control) throw InvalidGate("CZ requires a control qubit");
    if (*gate.control < 0 || *gate.control >= qubits_)
      throw InvalidGate("gate control " + std::to_string(*gate.control) + " outside register");
    if (*gate.control == gate.target) throw InvalidGate("CZ control equals target");
  } else if (gate.control) {
    throw InvalidGate("rotation gates take no control qubit");
  }
  if (!std::isfinite(gate.angle)) throw InvalidGate("non-finite rotation angle");
}

void Statevector::apply(const GateSpec& gate) {
  check(gate);
  const std::size_t dim = amps_.size();
  const std::size_t bit = std::size_t{1} << gate.target;

  if (gate.kind == GateKind::CZ) {
    const std::size_t both = bit | (std::size_t{1} << *gate.control);
    for (std::size_t b = 0; b < dim; ++b)
      if ((b & both) == both) amps_[b] = -amps_[b];
    return;
  }

  const double c = std::cos(0.5 * gate.angle);
  const double s = std::sin(0.5 * gate.angle);
  // 2x2 matrix [[m00, m01], [m10, m11]] acting on (|..0..>, |..1..>).
  cplx m00, m01, m10, m11;
  switch (gate.kind) {
    case GateKind::RX:
      m00 = c;
      m01 = cplx{0.0, -s};
      m10 = cplx{0.0, -s};
      m11 = c;
      break;
    case GateKind::RY:
      m00 = c;
      m01 = -s;
      m10 = s;
      m11 = c;
      break;
    case GateKind::RZ:
      m00 = cplx{c, -s};
      m01 = 0.0;
      m10 = 0.0;
      m11 = cplx{c, s};
      break;
    case GateKind::CZ:
      break;
  }
  for (std::size_t b = 0; b < dim; ++b) {
    if (b & bit) continue;
    const cplx a0 = amps_[b];
    const cplx a1 = amps_[b | bit];
    amps_[b] = m00 * a0 + m01 * a1;
    amps_[b | bit] = m10 * a0 + m11 * a1;
  }
}

void Statevector::apply_all(std::span<const GateSpec> gates) {
  for (const auto& g : gates) apply(g);
}

Statevector apply_gate(Statevector state, const GateSpec& gate) {
  state.apply(gate);
  return state;
}

double expectation(const Statevector& state, const PauliProduct& obs) {
  const auto amps = state.amplitudes();
  const std::uint32_t mask = obs.mask();
  double acc = 0.0;
  for (std::size_t b = 0; b < amps.size(); ++b) {
    const double p = std::norm(amps[b]);
    acc += (std::popcount(static_cast<std::uint32_t>(b) & mask) & 1) ? -p : p;
  }
  return acc;
}

}  // namespace vqmorl::quantum
