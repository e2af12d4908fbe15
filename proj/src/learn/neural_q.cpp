#include <algorithm>
#include <cmath>
#include <string>

#include <json.hpp>

#include "learn/q_function.hpp"

namespace vqmorl::learn {

NeuralQ::NeuralQ(std::vector<int> hidden, Rng& rng) {
  widths_.push_back(static_cast<int>(kFeatureCount));
  for (int h : hidden) {
    if (h < 1) throw Error(ErrorCode::InvalidArgument, "hidden layer widths must be positive");
    widths_.push_back(h);
  }
  widths_.push_back(static_cast<int>(kActionCount));
  build_layout();
  for (const auto& layer : layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
    const std::size_t count = static_cast<std::size_t>(layer.out) * (layer.in + 1);
    for (std::size_t k = 0; k < count; ++k) params_[layer.offset + k] = rng.uniform(-bound, bound);
  }
}

void NeuralQ::build_layout() {
  layers_.clear();
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    Layer layer{widths_[l], widths_[l + 1], offset};
    offset += static_cast<std::size_t>(layer.out) * (layer.in + 1);
    layers_.push_back(layer);
  }
  params_.assign(offset, 0.0);
}

std::vector<std::vector<double>> NeuralQ::forward(const FeatureVector& s) const {
  std::vector<std::vector<double>> z;
  std::vector<double> input(s.values.begin(), s.values.end());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    const double* w = params_.data() + layer.offset;
    const double* b = w + static_cast<std::size_t>(layer.out) * layer.in;
    std::vector<double> pre(static_cast<std::size_t>(layer.out));
    for (int o = 0; o < layer.out; ++o) {
      double acc = b[o];
      const double* row = w + static_cast<std::size_t>(o) * layer.in;
      for (int i = 0; i < layer.in; ++i) acc += row[i] * input[static_cast<std::size_t>(i)];
      pre[static_cast<std::size_t>(o)] = acc;
    }
    input = pre;
    if (l + 1 < layers_.size())
      for (auto& x : input) x = std::max(0.0, x);
    z.push_back(std::move(pre));
  }
  return z;
}

QVector NeuralQ::q_values(const FeatureVector& s) const {
  const auto z = forward(s);
  QVector q{};
  std::copy(z.back().begin(), z.back().end(), q.begin());
  return q;
}

double NeuralQ::gradient(const FeatureVector& s, std::size_t action, std::span<double> out) const {
  if (action >= kActionCount) throw Error(ErrorCode::InvalidArgument, "action index out of range");
  const auto z = forward(s);
  std::fill(out.begin(), out.end(), 0.0);

  std::vector<double> delta(kActionCount, 0.0);
  delta[action] = 1.0;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const auto& layer = layers_[l];
    std::vector<double> input;
    if (l == 0) {
      input.assign(s.values.begin(), s.values.end());
    } else {
      input = z[l - 1];
      for (auto& x : input) x = std::max(0.0, x);
    }
    const double* w = params_.data() + layer.offset;
    double* gw = out.data() + layer.offset;
    double* gb = gw + static_cast<std::size_t>(layer.out) * layer.in;
    std::vector<double> prev(static_cast<std::size_t>(layer.in), 0.0);
    for (int o = 0; o < layer.out; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      if (d == 0.0) continue;
      gb[o] = d;
      const std::size_t row = static_cast<std::size_t>(o) * layer.in;
      for (int i = 0; i < layer.in; ++i) {
        gw[row + i] = d * input[static_cast<std::size_t>(i)];
        prev[static_cast<std::size_t>(i)] += w[row + i] * d;
      }
    }
    if (l > 0)
      for (int i = 0; i < layer.in; ++i)
        if (z[l - 1][static_cast<std::size_t>(i)] <= 0.0) prev[static_cast<std::size_t>(i)] = 0.0;
    delta = std::move(prev);
  }
  return z.back()[action];
}

std::size_t NeuralQ::parameter_count() const { return params_.size(); }

std::vector<double> NeuralQ::parameters() const { return params_; }

void NeuralQ::set_parameters(std::span<const double> values) {
  if (values.size() != params_.size()) throw Error(ErrorCode::Architecture, "parameter count mismatch for " + architecture());
  std::copy(values.begin(), values.end(), params_.begin());
}

std::string NeuralQ::architecture() const {
  std::string out = "neural:";
  for (std::size_t i = 0; i < widths_.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(widths_[i]);
  }
  return out;
}

std::unique_ptr<QFunction> NeuralQ::clone() const { return std::unique_ptr<QFunction>(new NeuralQ(*this)); }

std::string NeuralQ::to_checkpoint() const {
  nlohmann::ordered_json doc;
  doc["kind"] = "neural";
  doc["widths"] = widths_;
  nlohmann::ordered_json layers = nlohmann::ordered_json::array();
  for (const auto& layer : layers_) {
    nlohmann::ordered_json weights = nlohmann::ordered_json::array();
    for (int o = 0; o < layer.out; ++o) {
      const auto begin = params_.begin() + static_cast<std::ptrdiff_t>(layer.offset + static_cast<std::size_t>(o) * layer.in);
      weights.push_back(std::vector<double>(begin, begin + layer.in));
    }
    const auto bias_begin = params_.begin() + static_cast<std::ptrdiff_t>(layer.offset + static_cast<std::size_t>(layer.out) * layer.in);
    nlohmann::ordered_json entry;
    entry["weights"] = std::move(weights);
    entry["bias"] = std::vector<double>(bias_begin, bias_begin + layer.out);
    layers.push_back(std::move(entry));
  }
  doc["layers"] = std::move(layers);
  return doc.dump(2) + "\n";
}

NeuralQ NeuralQ::from_checkpoint(const std::string& text) {
  const auto arch = [](const std::string& msg) { return Error(ErrorCode::Architecture, "neural checkpoint: " + msg); };
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Io, std::string("checkpoint is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("kind", "") != "neural") throw arch("missing kind = \"neural\"");
  if (!doc.contains("widths") || !doc["widths"].is_array()) throw arch("missing widths");
  NeuralQ q;
  for (const auto& w : doc["widths"]) {
    if (!w.is_number_integer() || w.get<int>() < 1) throw arch("widths must be positive integers");
    q.widths_.push_back(w.get<int>());
  }
  if (q.widths_.size() < 2 || q.widths_.front() != static_cast<int>(kFeatureCount) || q.widths_.back() != static_cast<int>(kActionCount))
    throw arch("widths must start at 5 and end at 15");
  q.build_layout();
  const auto& layers = doc.at("layers");
  if (!layers.is_array() || layers.size() != q.layers_.size()) throw arch("layer count does not match widths");
  for (std::size_t l = 0; l < q.layers_.size(); ++l) {
    const auto& layer = q.layers_[l];
    const auto& weights = layers[l].at("weights");
    const auto& bias = layers[l].at("bias");
    if (!weights.is_array() || weights.size() != static_cast<std::size_t>(layer.out)) throw arch("weight rows do not match widths");
    if (!bias.is_array() || bias.size() != static_cast<std::size_t>(layer.out)) throw arch("bias length does not match widths");
    for (int o = 0; o < layer.out; ++o) {
      const auto& row = weights[static_cast<std::size_t>(o)];
      if (!row.is_array() || row.size() != static_cast<std::size_t>(layer.in)) throw arch("weight columns do not match widths");
      for (int i = 0; i < layer.in; ++i)
        q.params_[layer.offset + static_cast<std::size_t>(o) * layer.in + i] = row[static_cast<std::size_t>(i)].get<double>();
      q.params_[layer.offset + static_cast<std::size_t>(layer.out) * layer.in + o] = bias[static_cast<std::size_t>(o)].get<double>();
    }
  }
  for (double p : q.params_)
    if (!std::isfinite(p)) throw arch("non-finite parameter");
  return q;
}

std::unique_ptr<QFunction> load_checkpoint(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Io, std::string("checkpoint is not valid JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("kind")) return std::make_unique<NeuralQ>(NeuralQ::from_checkpoint(text));
  return std::make_unique<VqcQ>(quantum::from_checkpoint_json(text));
}

}  // namespace vqmorl::learn
