#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hexwar/engine.hpp"
#include "hexwar/rng.hpp"

namespace hexwar {

inline constexpr std::uint32_t kAllActionsMask = (1u << kNumActions) - 1;

struct Transition {
  std::vector<double> obs;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_obs;
  bool terminal = false;
  // Actions legal in next_obs; the bootstrap max ranges over these only.
  std::uint32_t next_legal = kAllActionsMask;
  // Turns spanned by a temporally extended action; the bootstrap term is
  // discounted by gamma^duration.
  int duration = 1;
};

std::uint32_t legal_mask(const std::vector<Action>& legal);

// Fixed-capacity ring; once full, each push evicts the oldest item.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer capacity must be > 0");
    items_.reserve(capacity);
  }

  void push(Transition t) {
    if (t.action < 0 || t.action >= kNumActions) {
      throw std::invalid_argument("Transition action index out of range");
    }
    if (items_.size() < capacity_) {
      items_.push_back(std::move(t));
    } else {
      items_[next_] = std::move(t);
    }
    next_ = (next_ + 1) % capacity_;
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }

  // Oldest first.
  const Transition& at(std::size_t i) const {
    const std::size_t start = items_.size() < capacity_ ? 0 : next_;
    return items_.at((start + i) % items_.size());
  }

  // Uniform with replacement over occupied slots.
  std::vector<const Transition*> sample(std::size_t n, Rng& rng) const {
    if (items_.empty()) throw std::logic_error("sample from empty ReplayBuffer");
    std::vector<const Transition*> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(&items_[uniform_index(rng, items_.size())]);
    }
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> items_;
};

}  // namespace hexwar
