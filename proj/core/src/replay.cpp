#include "v2g/replay.hpp"

#include <stdexcept>

namespace v2g {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay: capacity must be > 0");
  store_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  if (size_ < capacity_) {
    store_.push_back(std::move(t));
    ++size_;
    next_ = size_ % capacity_;
  } else {
    store_[next_] = std::move(t);
    next_ = (next_ + 1) % capacity_;
  }
}

const Transition& ReplayBuffer::at(std::size_t logical) const {
  if (logical >= size_) throw std::out_of_range("replay: index past size");
  if (size_ < capacity_) return store_[logical];
  return store_[(next_ + logical) % capacity_];
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t k, Rng& rng) const {
  if (size_ < k) throw std::logic_error("replay: not enough samples");
  std::vector<const Transition*> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i)
    out.push_back(&store_[rng.uniform_index(size_)]);
  return out;
}

}  // namespace v2g
