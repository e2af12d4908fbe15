#pragma once

#include <cstddef>
#include <vector>

#include "common/error.hpp"
#include "common/features.hpp"
#include "common/rng.hpp"

namespace vqmorl::learn {

struct Transition {
  FeatureVector s;
  std::size_t a = 0;
  double r = 0.0;
  FeatureVector s_next;
  bool done = false;
};

/// Fixed-capacity FIFO ring buffer of transitions.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw Error(ErrorCode::InvalidArgument, "replay capacity must be positive");
    buffer_.reserve(capacity);
  }

  void push(const Transition& t) {
    if (t.a >= kActionCount) throw Error(ErrorCode::InvalidArgument, "transition action out of range");
    if (buffer_.size() < capacity_) {
      buffer_.push_back(t);
    } else {
      buffer_[head_] = t;
      head_ = (head_ + 1) % capacity_;
    }
  }

  std::size_t size() const noexcept { return buffer_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }

  /// i-th oldest stored transition.
  const Transition& at(std::size_t i) const { return buffer_.at((head_ + i) % buffer_.size()); }

  /// m uniform draws with replacement.
  std::vector<Transition> sample(std::size_t m, Rng& rng) const {
    if (buffer_.empty()) throw Error(ErrorCode::State, "cannot sample an empty replay memory");
    std::vector<Transition> out;
    out.reserve(m);
    for (std::size_t k = 0; k < m; ++k) out.push_back(buffer_[rng.index(buffer_.size())]);
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // oldest element once full
  std::vector<Transition> buffer_;
};

}  // namespace vqmorl::learn
