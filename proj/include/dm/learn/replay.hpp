#pragma once

// Uniform experience replay: a ring buffer sampled without priority.

#include <cassert>
#include <vector>

#include "dm/policy/policy.hpp"

namespace dm {

struct Transition {
  StateFeatures features;
  int action = -1;
  double behavior_prob = 1.0; // mu(a|s) of the behaviour policy
  double reward = 0.0;
  StateFeatures next_features; // unset when terminal
  bool terminal = false;
  bool oracle_generated = false; // came from a demonstration episode
  int oracle_action = -1;        // supervision label, -1 when absent
};

class ReplayBuffer {
public:
  explicit ReplayBuffer(size_t capacity) : capacity_(capacity) { items_.reserve(capacity); }

  void push(Transition t) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(t));
    } else {
      items_[next_] = std::move(t);
      next_ = (next_ + 1) % capacity_;
    }
  }

  size_t size() const { return items_.size(); }
  size_t capacity() const { return capacity_; }
  const Transition& operator[](size_t i) const { return items_[i]; }

  const Transition& sample(Rng& rng) const {
    assert(!items_.empty());
    return items_[std::uniform_int_distribution<size_t>(0, items_.size() - 1)(rng)];
  }
  std::vector<const Transition*> sample_batch(Rng& rng, size_t n) const {
    std::vector<const Transition*> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) out.push_back(&sample(rng));
    return out;
  }

  double oracle_fraction() const {
    if (items_.empty()) return 0.0;
    size_t n = 0;
    for (const auto& t : items_) n += t.oracle_generated;
    return static_cast<double>(n) / static_cast<double>(items_.size());
  }

private:
  std::vector<Transition> items_;
  size_t capacity_;
  size_t next_ = 0;
};

} // namespace dm
