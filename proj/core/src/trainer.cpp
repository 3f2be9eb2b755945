#include "v2g/trainer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace v2g {

std::string algo_name(Algo a) {
  switch (a) {
    case Algo::IL: return "il";
    case Algo::MADDPG: return "maddpg";
    case Algo::DT_MADDPG: return "dt_maddpg";
  }
  return "?";
}

Algo algo_from_name(const std::string& name) {
  if (name == "il") return Algo::IL;
  if (name == "maddpg") return Algo::MADDPG;
  if (name == "dt_maddpg" || name == "dt-maddpg") return Algo::DT_MADDPG;
  throw std::invalid_argument("unknown algorithm: " + name);
}

void LearnerConfig::validate() {
  if (gamma < 0.0 || gamma >= 1.0) throw std::invalid_argument("learner: gamma must be in [0,1)");
  if (tau <= 0.0 || tau > 1.0) throw std::invalid_argument("learner: tau must be in (0,1]");
  if (lr_actor <= 0.0 || lr_critic <= 0.0) throw std::invalid_argument("learner: lr must be > 0");
  if (minibatch_k < 1) throw std::invalid_argument("learner: minibatch_k must be >= 1");
  if (k_prime < 0) throw std::invalid_argument("learner: k_prime must be >= 0");
  if (fd_step_h <= 0.0) throw std::invalid_argument("learner: fd_step_h must be > 0");
  if (train_period < 1) throw std::invalid_argument("learner: train_period must be >= 1");
  if (gate_multiple < 1) throw std::invalid_argument("learner: gate_multiple must be >= 1");
  if (actor_hidden.empty() || critic_hidden.empty())
    throw std::invalid_argument("learner: hidden layer lists must be non-empty");
  for (int h : actor_hidden)
    if (h < 1) throw std::invalid_argument("learner: bad actor hidden size");
  for (int h : critic_hidden)
    if (h < 1) throw std::invalid_argument("learner: bad critic hidden size");
  // The rollout baseline only exists for DT-MADDPG.
  if (algorithm != Algo::DT_MADDPG) k_prime = 0;
  if (algorithm != Algo::DT_MADDPG) sim_features_in_critic = false;
}

double select_action(const ParamSet& actor, const Observation& obs, const FeatureSpec& spec,
                     double noise_sigma, const ActionBounds& bounds, Rng& rng) {
  if (obs.plugged < 0.5) return 0.0;
  std::vector<double> feats = observation_features(obs, spec);
  const double u = forward(actor, feats)[0];
  double a = bounds.mid() + bounds.scale() * u;
  if (noise_sigma > 0.0) a += noise_sigma * bounds.scale() * rng.normal();
  return std::clamp(a, bounds.lo, bounds.hi);
}

Trainer::Trainer(LearnerConfig cfg, FeatureSpec spec, std::vector<ActionBounds> bounds, Rng& init_rng)
    : cfg_(std::move(cfg)), spec_(spec), bounds_(std::move(bounds)) {
  cfg_.validate();
  const int n = static_cast<int>(bounds_.size());
  if (n < 1) throw std::invalid_argument("trainer: need at least one agent");
  feat_dim_ = spec_.dim();
  if (cfg_.algorithm == Algo::IL)
    critic_in_ = feat_dim_ + 1;
  else
    critic_in_ = n * feat_dim_ + n + (cfg_.sim_features_in_critic ? 2 : 0);

  std::vector<int> actor_sizes;
  actor_sizes.push_back(feat_dim_);
  for (int h : cfg_.actor_hidden) actor_sizes.push_back(h);
  actor_sizes.push_back(1);
  std::vector<int> critic_sizes;
  critic_sizes.push_back(critic_in_);
  for (int h : cfg_.critic_hidden) critic_sizes.push_back(h);
  critic_sizes.push_back(1);

  nets_.resize(n);
  for (int i = 0; i < n; ++i) {
    AgentNets& a = nets_[i];
    a.actor = make_mlp(actor_sizes, Act::Tanh, Act::Tanh, init_rng);
    a.critic = make_mlp(critic_sizes, Act::Tanh, Act::Identity, init_rng);
    a.target_actor = a.actor;
    a.target_critic = a.critic;
    a.actor_opt = make_opt_state(a.actor);
    a.critic_opt = make_opt_state(a.critic);
  }
  scratch_grads_ = make_congruent_zeros(nets_[0].critic);
}

double Trainer::act(int agent, const Observation& obs, double noise_sigma, Rng& rng) const {
  return select_action(nets_.at(agent).actor, obs, spec_, noise_sigma, bounds_.at(agent), rng);
}

double Trainer::act_target(int agent, const Observation& obs) const {
  Rng dummy(0);
  return select_action(nets_.at(agent).target_actor, obs, spec_, 0.0, bounds_.at(agent), dummy);
}

void Trainer::assemble_critic_input(const std::vector<Observation>& obs,
                                    const std::vector<double>& actions, int agent,
                                    const double* sim_features, double* out) const {
  const int n = n_agents();
  if (cfg_.algorithm == Algo::IL) {
    observation_features(obs[agent], spec_, out);
    out[feat_dim_] = actions[agent] / bounds_[agent].scale();
    return;
  }
  for (int j = 0; j < n; ++j) observation_features(obs[j], spec_, out + j * feat_dim_);
  for (int j = 0; j < n; ++j) out[n * feat_dim_ + j] = actions[j] / bounds_[j].scale();
  if (cfg_.sim_features_in_critic) {
    out[n * feat_dim_ + n] = sim_features ? sim_features[0] : 0.0;
    out[n * feat_dim_ + n + 1] = sim_features ? sim_features[1] : 0.0;
  }
}

std::vector<double> Trainer::rollout_policy_actions(const std::vector<Observation>& obs,
                                                    bool use_target) const {
  const int n = n_agents();
  std::vector<double> a(n, 0.0);
  Rng dummy(0);
  for (int i = 0; i < n; ++i)
    a[i] = select_action(use_target ? nets_[i].target_actor : nets_[i].actor, obs[i], spec_, 0.0,
                         bounds_[i], dummy);
  return a;
}

Trainer::TrainStats Trainer::train_step(const ReplayBuffer& buffer, const SimModel* model,
                                        Rng& rng) {
  TrainStats stats;
  const std::size_t K = static_cast<std::size_t>(cfg_.minibatch_k);
  if (buffer.size() < cfg_.train_gate()) return stats;
  stats.trained = true;

  const int n = n_agents();
  const auto batch = buffer.sample(K, rng);

  // Target joint actions (Algorithm line: form a' from the target actors).
  std::vector<std::vector<double>> a_next(K);
  for (std::size_t k = 0; k < K; ++k)
    a_next[k] = rollout_policy_actions(batch[k]->next_obs, /*use_target=*/true);

  // Simulation value baselines for the stored and the target joint action.
  const bool use_model = cfg_.k_prime > 0 && model != nullptr;
  std::vector<std::vector<double>> r_sim(K), r_sim_next(K);
  for (std::size_t k = 0; k < K; ++k) {
    if (use_model) {
      const auto main_policy = [this](int i, const Observation& o) {
        Rng dummy(0);
        return select_action(nets_[i].actor, o, spec_, 0.0, bounds_[i], dummy);
      };
      const auto target_policy = [this](int i, const Observation& o) {
        Rng dummy(0);
        return select_action(nets_[i].target_actor, o, spec_, 0.0, bounds_[i], dummy);
      };
      r_sim[k] = model->rollout(GridSnapshot::from_observations(batch[k]->obs), batch[k]->actions,
                                cfg_.k_prime, cfg_.gamma, main_policy, rng);
      r_sim_next[k] = model->rollout(GridSnapshot::from_observations(batch[k]->next_obs), a_next[k],
                                     cfg_.k_prime, cfg_.gamma, target_policy, rng);
    } else {
      r_sim[k].assign(n, 0.0);
      r_sim_next[k].assign(n, 0.0);
    }
  }

  // Optional s_sim summary features (predicted next grid draw, mean predicted
  // reward) appended to the critic input; held constant in the actor update.
  std::vector<std::array<double, 2>> simf(K, {0.0, 0.0}), simf_next(K, {0.0, 0.0});
  if (cfg_.sim_features_in_critic && use_model) {
    for (std::size_t k = 0; k < K; ++k) {
      auto snap = GridSnapshot::from_observations(batch[k]->obs);
      auto r = model->predict_step(snap, batch[k]->actions, rng);
      simf[k] = {snap.window.empty() ? 0.0 : snap.window.back() / spec_.load_norm_kw,
                 std::accumulate(r.begin(), r.end(), 0.0) / n};
      auto snap_n = GridSnapshot::from_observations(batch[k]->next_obs);
      auto rn = model->predict_step(snap_n, a_next[k], rng);
      simf_next[k] = {snap_n.window.empty() ? 0.0 : snap_n.window.back() / spec_.load_norm_kw,
                      std::accumulate(rn.begin(), rn.end(), 0.0) / n};
    }
  }

  // Critic inputs. For the joint critics these are shared across agents.
  const bool joint = cfg_.algorithm != Algo::IL;
  std::vector<std::vector<double>> X(K), Xn(K);
  if (joint) {
    for (std::size_t k = 0; k < K; ++k) {
      X[k].resize(critic_in_);
      Xn[k].resize(critic_in_);
      assemble_critic_input(batch[k]->obs, batch[k]->actions, 0, simf[k].data(), X[k].data());
      assemble_critic_input(batch[k]->next_obs, a_next[k], 0, simf_next[k].data(), Xn[k].data());
    }
  }

  ParamSet critic_grads = make_congruent_zeros(nets_[0].critic);
  ParamSet actor_grads = make_congruent_zeros(nets_[0].actor);
  FwdCache cache;
  std::vector<double> il_x(critic_in_), il_xn(critic_in_), x_patch(critic_in_);
  const AdamParams critic_adam{cfg_.lr_critic, 0.9, 0.999, 1e-8};
  const AdamParams actor_adam{cfg_.lr_actor, 0.9, 0.999, 1e-8};

  double critic_loss_total = 0.0, actor_loss_total = 0.0;
  for (int i = 0; i < n; ++i) {
    AgentNets& an = nets_[i];
    const int action_slot = joint ? n * feat_dim_ + i : feat_dim_;

    // ---- critic update (Eq.: mean squared error against the target) ----
    zero_params(critic_grads);
    double loss = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const Transition& tr = *batch[k];
      const double* x = nullptr;
      const double* xn = nullptr;
      if (joint) {
        x = X[k].data();
        xn = Xn[k].data();
      } else {
        assemble_critic_input(tr.obs, tr.actions, i, nullptr, il_x.data());
        assemble_critic_input(tr.next_obs, a_next[k], i, nullptr, il_xn.data());
        x = il_x.data();
        xn = il_xn.data();
      }
      const double q_next =
          forward(an.target_critic, std::span<const double>(xn, critic_in_))[0];
      const double y = critic_target(tr.rewards[i], cfg_.gamma, r_sim_next[k][i], q_next,
                                     tr.done[i] != 0);
      const double q = forward(an.critic, std::span<const double>(x, critic_in_), cache)[0];
      const double err = composite_q(r_sim[k][i], q) - y;
      loss += err * err / static_cast<double>(K);
      const double dy = 2.0 * err / static_cast<double>(K);
      backward(an.critic, cache, std::span<const double>(&dy, 1), critic_grads);
    }
    adam_step(an.critic, critic_grads, an.critic_opt, critic_adam);
    critic_loss_total += loss;

    // ---- actor update (deterministic policy gradient through Q_i) ----
    zero_params(actor_grads);
    double actor_obj = 0.0;
    FwdCache acache;
    for (std::size_t k = 0; k < K; ++k) {
      const Transition& tr = *batch[k];
      if (tr.obs[i].plugged < 0.5) continue;  // the policy had no effect
      const auto feats = observation_features(tr.obs[i], spec_);
      const double u = forward(an.actor, feats, acache)[0];
      const double a_new = bounds_[i].mid() + bounds_[i].scale() * u;
      if (joint) {
        std::copy(X[k].begin(), X[k].end(), x_patch.begin());
      } else {
        assemble_critic_input(tr.obs, tr.actions, i, nullptr, x_patch.data());
      }
      x_patch[action_slot] = a_new / bounds_[i].scale();
      const double q = forward(an.critic, x_patch, cache)[0];
      zero_params(scratch_grads_);
      const double one = 1.0;
      const auto dx = backward(an.critic, cache, std::span<const double>(&one, 1), scratch_grads_);
      double da = dx[action_slot] / bounds_[i].scale();

      if (cfg_.use_rsim_actor_grad && use_model) {
        // The rollout is not differentiable; central differences with common
        // random numbers estimate d(R_sim)/da_i.
        const std::uint64_t fd_seed = rng.next_u64();
        std::vector<double> a_plus = tr.actions, a_minus = tr.actions;
        a_plus[i] = a_new + cfg_.fd_step_h;
        a_minus[i] = a_new - cfg_.fd_step_h;
        const auto main_policy = [this](int j, const Observation& o) {
          Rng dummy(0);
          return select_action(nets_[j].actor, o, spec_, 0.0, bounds_[j], dummy);
        };
        Rng fd_rng_a(fd_seed), fd_rng_b(fd_seed);
        const auto rp = model->rollout(GridSnapshot::from_observations(tr.obs), a_plus,
                                       cfg_.k_prime, cfg_.gamma, main_policy, fd_rng_a);
        const auto rm = model->rollout(GridSnapshot::from_observations(tr.obs), a_minus,
                                       cfg_.k_prime, cfg_.gamma, main_policy, fd_rng_b);
        da += (rp[i] - rm[i]) / (2.0 * cfg_.fd_step_h);
      }

      const double du = -da * bounds_[i].scale() / static_cast<double>(K);
      backward(an.actor, acache, std::span<const double>(&du, 1), actor_grads);
      actor_obj -= q / static_cast<double>(K);
    }
    adam_step(an.actor, actor_grads, an.actor_opt, actor_adam);
    actor_loss_total += actor_obj;
  }

  // Soft update all target networks.
  for (int i = 0; i < n; ++i) {
    soft_update(nets_[i].target_critic, nets_[i].critic, cfg_.tau);
    soft_update(nets_[i].target_actor, nets_[i].actor, cfg_.tau);
  }

  stats.critic_loss = critic_loss_total / n;
  stats.actor_loss = actor_loss_total / n;
  return stats;
}

std::uint64_t Trainer::params_checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int k = 0; k < 8; ++k) {
      h ^= (v >> (8 * k)) & 0xffULL;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& an : nets_) {
    mix(param_checksum(an.actor));
    mix(param_checksum(an.critic));
    mix(param_checksum(an.target_actor));
    mix(param_checksum(an.target_critic));
  }
  return h;
}

}  // namespace v2g
