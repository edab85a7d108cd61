#include "airhockey/replay_buffer.hpp"

#include <stdexcept>

namespace airhockey::rl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : storage_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay buffer: capacity must be positive");
}

void ReplayBuffer::push(const Transition& t) {
  storage_[next_] = t;
  next_ = (next_ + 1) % storage_.size();
  if (size_ < storage_.size()) ++size_;
}

const Transition& ReplayBuffer::at(std::size_t index) const {
  if (index >= size_) throw std::out_of_range("replay buffer: index out of range");
  const std::size_t oldest = size_ < storage_.size() ? 0 : next_;
  return storage_[(oldest + index) % storage_.size()];
}

}  // namespace airhockey::rl
