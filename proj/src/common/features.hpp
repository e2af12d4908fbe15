#pragma once

#include <array>
#include <cstddef>

namespace vqmorl {

inline constexpr std::size_t kFeatureCount = 5;
inline constexpr std::size_t kActionCount = 15;

/// Encoder input: five reals, each expected in [-1, 1].
struct FeatureVector {
  std::array<double, kFeatureCount> values{};

  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  bool in_range() const {
    for (double v : values)
      if (!(v >= -1.0 && v <= 1.0)) return false;
    return true;
  }
  bool operator==(const FeatureVector&) const = default;
};

using QVector = std::array<double, kActionCount>;

}  // namespace vqmorl
