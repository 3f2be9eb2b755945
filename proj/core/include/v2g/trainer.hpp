#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "v2g/grid_env.hpp"
#include "v2g/net.hpp"
#include "v2g/replay.hpp"
#include "v2g/sim_model.hpp"
#include "v2g/rng.hpp"

namespace v2g {

enum class Algo { IL, MADDPG, DT_MADDPG };

std::string algo_name(Algo a);
Algo algo_from_name(const std::string& name);

struct LearnerConfig {
  Algo algorithm = Algo::DT_MADDPG;
  double gamma = 0.95;
  double tau = 0.01;
  double lr_actor = 1e-4;
  double lr_critic = 1e-3;
  int minibatch_k = 64;
  int k_prime = 4;                   // rollout horizon; forced to 0 for MADDPG/IL
  double fd_step_h = 1e-3;           // finite-difference step for d(R_sim)/da
  bool use_rsim_actor_grad = false;  // add the rollout term to the policy gradient
  bool sim_features_in_critic = false;
  std::vector<int> actor_hidden = {64, 64};
  std::vector<int> critic_hidden = {64, 64};
  double noise_sigma_start = 0.3;  // in units of the action half-range
  double noise_sigma_end = 0.05;
  int train_period = 2;  // env steps per train step
  std::size_t buffer_capacity = 100000;
  int gate_multiple = 10;  // training starts at gate_multiple * minibatch_k samples

  std::size_t train_gate() const { return static_cast<std::size_t>(gate_multiple) * minibatch_k; }
  void validate();  // normalizes (e.g. forces k_prime for maddpg/il) and checks ranges
};

struct ActionBounds {
  double lo = -7.0;  // -a_max_discharge
  double hi = 7.0;   // +a_max_charge
  double scale() const { return 0.5 * (hi - lo); }
  double mid() const { return 0.5 * (hi + lo); }
};

// The four networks per agent plus optimizer state.
struct AgentNets {
  ParamSet actor, critic;
  ParamSet target_actor, target_critic;
  OptState actor_opt, critic_opt;
};

// Deterministic tanh policy mapped into the agent's action bounds, plus
// Gaussian exploration noise, clamped. Away EVs always act 0. Reads only the
// agent's own observation and networks (decentralised execution).
double select_action(const ParamSet& actor, const Observation& obs, const FeatureSpec& spec,
                     double noise_sigma, const ActionBounds& bounds, Rng& rng);

// Composite action value: simulated short-term baseline plus learned residual.
inline double composite_q(double r_sim, double q_res) { return r_sim + q_res; }

// Bootstrap target with episode/departure truncation.
inline double critic_target(double r, double gamma, double r_sim_next, double q_res_target_next,
                            bool done) {
  return r + gamma * (done ? 0.0 : (r_sim_next + q_res_target_next));
}

// The shared actor-critic trainer behind all three algorithms. IL uses a local
// critic over (o_i, a_i); MADDPG and DT-MADDPG use a joint critic over all
// observations and actions; DT-MADDPG additionally decomposes the value as
// R_sim + Q_res with R_sim produced by the global model rollout.
class Trainer {
 public:
  Trainer(LearnerConfig cfg, FeatureSpec spec, std::vector<ActionBounds> bounds, Rng& init_rng);

  int n_agents() const { return static_cast<int>(nets_.size()); }
  const LearnerConfig& config() const { return cfg_; }
  const FeatureSpec& feature_spec() const { return spec_; }
  const ActionBounds& bounds(int i) const { return bounds_.at(i); }

  double act(int agent, const Observation& obs, double noise_sigma, Rng& rng) const;
  double act_target(int agent, const Observation& obs) const;

  struct TrainStats {
    bool trained = false;
    double critic_loss = 0.0;
    double actor_loss = 0.0;  // negative mean Q over the minibatch
  };

  // One full update per Algorithm steps 15-33: sample, rollout baselines,
  // critic and actor updates for every agent, then soft-update all targets.
  TrainStats train_step(const ReplayBuffer& buffer, const SimModel* model, Rng& rng);

  AgentNets& nets(int agent) { return nets_.at(agent); }
  const AgentNets& nets(int agent) const { return nets_.at(agent); }
  std::uint64_t params_checksum() const;

  int critic_input_dim() const { return critic_in_; }

 private:
  void assemble_critic_input(const std::vector<Observation>& obs, const std::vector<double>& actions,
                             int agent, const double* sim_features, double* out) const;
  std::vector<double> rollout_policy_actions(const std::vector<Observation>& obs, bool use_target) const;

  LearnerConfig cfg_;
  FeatureSpec spec_;
  std::vector<ActionBounds> bounds_;
  std::vector<AgentNets> nets_;
  int critic_in_ = 0;
  int feat_dim_ = 0;
  // scratch, reused across samples to avoid per-sample allocation
  mutable ParamSet scratch_grads_;
  mutable FwdCache scratch_cache_;
};

}  // namespace v2g
