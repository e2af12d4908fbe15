#include <algorithm>
#include <string>

#include "learn/q_function.hpp"

namespace vqmorl::learn {

VqcQ::VqcQ(quantum::VqcParams params) : params_(std::move(params)) { params_.validate(); }

QVector VqcQ::q_values(const FeatureVector& s) const { return quantum::q_values(params_, s); }

double VqcQ::gradient(const FeatureVector& s, std::size_t action, std::span<double> out) const {
  const auto g = quantum::parameter_shift_grad(params_, s, action);
  std::fill(out.begin(), out.end(), 0.0);
  std::copy(g.theta.begin(), g.theta.end(), out.begin());
  out[params_.theta.size() + action] = g.weight;
  return g.value;
}

std::size_t VqcQ::parameter_count() const { return params_.theta.size() + params_.action_weights.size(); }

std::vector<double> VqcQ::parameters() const {
  std::vector<double> out = params_.theta;
  out.insert(out.end(), params_.action_weights.begin(), params_.action_weights.end());
  return out;
}

void VqcQ::set_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) throw Error(ErrorCode::Architecture, "parameter count mismatch for " + architecture());
  const auto split = values.begin() + static_cast<std::ptrdiff_t>(params_.theta.size());
  std::copy(values.begin(), split, params_.theta.begin());
  std::copy(split, values.end(), params_.action_weights.begin());
}

std::string VqcQ::architecture() const {
  return "vqc:" + std::to_string(params_.qubits) + "q" + std::to_string(params_.layers) + "l";
}

std::unique_ptr<QFunction> VqcQ::clone() const { return std::make_unique<VqcQ>(*this); }

std::string VqcQ::to_checkpoint() const { return quantum::to_checkpoint_json(params_); }

}  // namespace vqmorl::learn
