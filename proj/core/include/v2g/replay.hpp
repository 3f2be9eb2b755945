#pragma once

#include <cstdint>
#include <vector>

#include "v2g/grid_env.hpp"
#include "v2g/rng.hpp"

namespace v2g {

// One stored joint experience: everything every agent saw, did and received.
// done flags truncate bootstrapping at an agent's departure.
struct Transition {
  std::vector<Observation> obs;
  std::vector<double> actions;
  std::vector<double> rewards;
  std::vector<Observation> next_obs;
  std::vector<std::uint8_t> done;
};

// Central experience buffer: FIFO ring, uniform sampling with replacement.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }

  // Logical index 0 is the oldest stored transition.
  const Transition& at(std::size_t logical) const;

  // Uniform with replacement; throws if fewer than k transitions are stored.
  std::vector<const Transition*> sample(std::size_t k, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::vector<Transition> store_;
  std::size_t next_ = 0;
  std::size_t size_ = 0;
};

}  // namespace v2g
