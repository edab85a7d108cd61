#pragma once

#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

#include "airhockey/env.hpp"

namespace airhockey::rl {

struct Transition {
  env::Features state{};
  int action = 0;
  double reward = 0.0;
  env::Features next_state{};
  bool bellman_terminal = false;  // strike or wall; never set for a step-cap ending

  bool operator==(const Transition&) const = default;
};

// Fixed-capacity FIFO ring. Once full, each push overwrites the oldest entry.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Transition& t);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return storage_.size(); }
  bool empty() const { return size_ == 0; }

  // Logical index: 0 is the oldest stored transition.
  const Transition& at(std::size_t index) const;

  // k draws, uniform with replacement over the current contents.
  template <typename Rng>
  void sample(std::size_t k, Rng& rng, std::vector<const Transition*>& out) const {
    if (size_ == 0) throw std::logic_error("replay buffer: sampling from an empty buffer");
    std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
    out.resize(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = &storage_[pick(rng)];
  }

 private:
  std::vector<Transition> storage_;
  std::size_t next_ = 0;
  std::size_t size_ = 0;
};

}  // namespace airhockey::rl
