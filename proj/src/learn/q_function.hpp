#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "common/features.hpp"
#include "common/rng.hpp"
#include "quantum/vqc.hpp"

namespace vqmorl::learn {

/// Q-function approximator over the 15 flat actions.
class QFunction {
 public:
  virtual ~QFunction() = default;

  virtual QVector q_values(const FeatureVector& s) const = 0;

  /// Writes dQ[action]/dparams into `out` (size parameter_count()) and
  /// returns Q[action].
  virtual double gradient(const FeatureVector& s, std::size_t action, std::span<double> out) const = 0;

  virtual std::size_t parameter_count() const = 0;
  virtual std::vector<double> parameters() const = 0;
  virtual void set_parameters(std::span<const double> values) = 0;

  /// Identifies the parameter layout; two functions with equal strings can
  /// exchange parameters.
  virtual std::string architecture() const = 0;
  virtual std::unique_ptr<QFunction> clone() const = 0;
  virtual std::string to_checkpoint() const = 0;
};

/// Variational-circuit Q-function; gradients by the parameter-shift rule.
/// Parameter layout: theta (layer, qubit, rotation) followed by the 15 weights.
class VqcQ final : public QFunction {
 public:
  explicit VqcQ(quantum::VqcParams params);

  QVector q_values(const FeatureVector& s) const override;
  double gradient(const FeatureVector& s, std::size_t action, std::span<double> out) const override;
  std::size_t parameter_count() const override;
  std::vector<double> parameters() const override;
  void set_parameters(std::span<const double> values) override;
  std::string architecture() const override;
  std::unique_ptr<QFunction> clone() const override;
  std::string to_checkpoint() const override;

  const quantum::VqcParams& params() const noexcept { return params_; }

 private:
  quantum::VqcParams params_;
};

/// Fully-connected ReLU network 5 -> hidden... -> 15 with linear outputs.
class NeuralQ final : public QFunction {
 public:
  /// Weights and biases ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  NeuralQ(std::vector<int> hidden, Rng& rng);

  QVector q_values(const FeatureVector& s) const override;
  double gradient(const FeatureVector& s, std::size_t action, std::span<double> out) const override;
  std::size_t parameter_count() const override;
  std::vector<double> parameters() const override;
  void set_parameters(std::span<const double> values) override;
  std::string architecture() const override;
  std::unique_ptr<QFunction> clone() const override;
  std::string to_checkpoint() const override;

  static NeuralQ from_checkpoint(const std::string& text);
  const std::vector<int>& widths() const noexcept { return widths_; }

 private:
  NeuralQ() = default;
  struct Layer {
    int in = 0;
    int out = 0;
    std::size_t offset = 0;  // weights [out][in] row-major, then out biases
  };
  void build_layout();
  /// Pre-activation outputs of every layer.
  std::vector<std::vector<double>> forward(const FeatureVector& s) const;

  std::vector<int> widths_;  // input, hidden..., output
  std::vector<Layer> layers_;
  std::vector<double> params_;
};

/// Parses either checkpoint kind.
std::unique_ptr<QFunction> load_checkpoint(const std::string& text);

}  // namespace vqmorl::learn
