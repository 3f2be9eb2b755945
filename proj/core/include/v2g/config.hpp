#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "v2g/comms.hpp"
#include "v2g/grid_env.hpp"
#include "v2g/reward.hpp"
#include "v2g/sim_model.hpp"
#include "v2g/trainer.hpp"

namespace v2g {

struct SweepConfig {
  std::string param = "w_revenue";
  std::vector<double> values;
  int seeds_per_value = 5;
};

// Whole-experiment configuration. Everything is defaulted; a JSON config file
// overrides fields selectively (schema documented in the README).
struct ExperimentConfig {
  Algo algorithm = Algo::DT_MADDPG;
  int n_agents = 10;
  int episodes = 300;
  std::uint64_t seed = 42;
  std::string out_dir = "out";
  int eval_episodes = 10;
  int checkpoint_every = 0;  // episodes; 0 disables periodic checkpoints
  std::string eval_checkpoint;  // when set: skip training, evaluate these nets

  GridConfig grid;
  FleetConfig fleet;
  RewardConfig reward;
  LearnerConfig learner;
  ModelConfig model;
  CommsConfig comms;
  SweepConfig sweep;

  void validate();
  static ExperimentConfig defaults();
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& cfg);

// Applies a named sweep parameter (w_revenue, w_global, k_prime,
// fidelity_noise) to a copy of the base config.
ExperimentConfig apply_sweep_value(const ExperimentConfig& base, const std::string& param,
                                   double value);

}  // namespace v2g
