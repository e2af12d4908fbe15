#include "quantum/vqc.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include <json.hpp>

namespace vqmorl::quantum {

namespace {

PauliProduct observable_for(std::size_t action) {
  const int q = static_cast<int>(action % kQubits);
  const int q1 = (q + 1) % kQubits;
  const int q2 = (q + 2) % kQubits;
  switch (action / kQubits) {
    case 0:
      return PauliProduct({q}, kQubits);
    case 1:
      return PauliProduct({q, q1}, kQubits);
    default:
      return PauliProduct({q, q1, q2}, kQubits);
  }
}

template <std::size_t... I>
std::array<PauliProduct, sizeof...(I)> make_observables(std::index_sequence<I...>) {
  return {observable_for(I)...};
}

}  // namespace

const std::array<PauliProduct, kActionCount>& action_observables() {
  static const auto table = make_observables(std::make_index_sequence<kActionCount>{});
  return table;
}

VqcParams init_params(int layers, InitScheme scheme, double scale, Rng& rng) {
  VqcParams p(layers);
  if (scheme == InitScheme::Uniform) {
    for (auto& t : p.theta) t = rng.uniform(-scale, scale);
  }
  return p;
}

namespace {

QVector observe_all(const Statevector& s) {
  QVector out{};
  const auto& obs = action_observables();
  for (std::size_t a = 0; a < kActionCount; ++a) out[a] = expectation(s, obs[a]);
  return out;
}

}  // namespace

QVector expectations(const VqcParams& params, const FeatureVector& features) {
  const auto gates = build_circuit(params, features);
  return observe_all(run_circuit(gates, params.qubits));
}

QVector q_values(const VqcParams& params, const FeatureVector& features) {
  QVector q = expectations(params, features);
  for (std::size_t a = 0; a < kActionCount; ++a) q[a] *= params.action_weights[a];
  return q;
}

VqcGradient parameter_shift_grad(const VqcParams& params, const FeatureVector& features, std::size_t action) {
  if (action >= kActionCount) throw Error(ErrorCode::InvalidArgument, "action index out of range");
  const auto gates = build_circuit(params, features);
  const PauliProduct& obs = action_observables()[action];
  const double w = params.action_weights[action];

  VqcGradient grad;
  grad.theta.assign(params.theta.size(), 0.0);

  // Walk the circuit once; at each variational gate, branch off the two
  // shifted evaluations from the cached prefix state.
  Statevector prefix(params.qubits);
  for (std::size_t g = 0; g < gates.size(); ++g) {
    const GateSpec& gate = gates[g];
    if (gate.param_index >= 0 && w != 0.0) {
      const auto suffix = std::span<const GateSpec>(gates).subspan(g + 1);
      double shifted[2];
      for (int side = 0; side < 2; ++side) {
        GateSpec moved = gate;
        moved.angle += side == 0 ? std::numbers::pi / 2 : -std::numbers::pi / 2;
        Statevector branch = prefix;
        branch.apply(moved);
        branch.apply_all(suffix);
        shifted[side] = expectation(branch, obs);
      }
      grad.theta[static_cast<std::size_t>(gate.param_index)] = w * 0.5 * (shifted[0] - shifted[1]);
    }
    prefix.apply(gate);
  }
  grad.weight = expectation(prefix, obs);
  grad.value = w * grad.weight;
  return grad;
}

std::string to_checkpoint_json(const VqcParams& params) {
  params.validate();
  nlohmann::json theta = nlohmann::json::array();
  for (int l = 0; l < params.layers; ++l) {
    nlohmann::json layer = nlohmann::json::array();
    for (int q = 0; q < params.qubits; ++q) {
      nlohmann::json rot = nlohmann::json::array();
      for (int r = 0; r < kRotationsPerQubit; ++r) rot.push_back(params.angle(l, q, r));
      layer.push_back(std::move(rot));
    }
    theta.push_back(std::move(layer));
  }
  nlohmann::ordered_json doc;
  doc["qubits"] = params.qubits;
  doc["layers"] = params.layers;
  doc["theta"] = theta;
  doc["action_weights"] = params.action_weights;
  return doc.dump(2) + "\n";
}

VqcParams from_checkpoint_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Io, std::string("checkpoint is not valid JSON: ") + e.what());
  }
  const auto arch = [](const std::string& msg) { return Error(ErrorCode::Architecture, "VQC checkpoint: " + msg); };
  if (!doc.is_object()) throw arch("expected an object");
  for (const char* key : {"qubits", "layers", "theta", "action_weights"})
    if (!doc.contains(key)) throw arch(std::string("missing field '") + key + "'");
  for (const auto& [key, _] : doc.items())
    if (key != "qubits" && key != "layers" && key != "theta" && key != "action_weights")
      throw arch("unexpected field '" + key + "'");
  if (!doc["qubits"].is_number_integer() || doc["qubits"].get<int>() != kQubits) throw arch("qubits must be 5");
  if (!doc["layers"].is_number_integer() || doc["layers"].get<int>() < 1) throw arch("layers must be a positive integer");

  VqcParams p(doc["layers"].get<int>());
  const auto& theta = doc["theta"];
  if (!theta.is_array() || theta.size() != static_cast<std::size_t>(p.layers)) throw arch("theta must have one entry per layer");
  for (int l = 0; l < p.layers; ++l) {
    const auto& layer = theta[static_cast<std::size_t>(l)];
    if (!layer.is_array() || layer.size() != static_cast<std::size_t>(p.qubits)) throw arch("theta layer must have 5 qubits");
    for (int q = 0; q < p.qubits; ++q) {
      const auto& rot = layer[static_cast<std::size_t>(q)];
      if (!rot.is_array() || rot.size() != kRotationsPerQubit) throw arch("each qubit carries exactly 2 rotation angles");
      for (int r = 0; r < kRotationsPerQubit; ++r) {
        if (!rot[static_cast<std::size_t>(r)].is_number()) throw arch("rotation angles must be numbers");
        p.angle(l, q, r) = rot[static_cast<std::size_t>(r)].get<double>();
      }
    }
  }
  const auto& w = doc["action_weights"];
  if (!w.is_array() || w.size() != kActionCount) throw arch("action_weights must have 15 entries");
  for (std::size_t a = 0; a < kActionCount; ++a) {
    if (!w[a].is_number()) throw arch("action weights must be numbers");
    p.action_weights[a] = w[a].get<double>();
  }
  p.validate();
  return p;
}

}  // namespace vqmorl::quantum
