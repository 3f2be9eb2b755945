#pragma once

#include <string>

#include "v2g/net.hpp"
#include "v2g/trainer.hpp"

namespace v2g {

// JSON checkpoint of every agent's four networks, both optimizer states and
// the caller's RNG streams, sufficient to resume or re-evaluate a run.
void save_checkpoint(const std::string& path, const Trainer& trainer,
                     const std::vector<std::string>& rng_states);

struct CheckpointData {
  std::vector<AgentNets> nets;
  std::vector<std::string> rng_states;
};

CheckpointData load_checkpoint(const std::string& path);

// Restores network weights and optimizer state into a congruent trainer.
void restore_trainer(Trainer& trainer, const CheckpointData& data);

}  // namespace v2g
