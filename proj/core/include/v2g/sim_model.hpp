#pragma once

#include <functional>
#include <vector>

#include "v2g/grid_env.hpp"
#include "v2g/reward.hpp"
#include "v2g/rng.hpp"

namespace v2g {

// Global state reassembled from stored per-agent observations. The shared
// fields are replicated in every observation; agent 0's copy is used.
struct GridSnapshot {
  double hour = 0.0;
  double base_load = 0.0;
  double renewable = 0.0;
  std::vector<double> window;  // trailing p_grid, most recent last
  struct AgentState {
    double soc = 0.0;
    int t_etd = 0;
    double soc_target = 0.0;
    bool plugged = false;
  };
  std::vector<AgentState> agents;

  static GridSnapshot from_observations(const std::vector<Observation>& obs);
  // The observation an agent's policy would see in this predicted state.
  Observation observation_of(int agent, const PricingSchedule& pricing) const;
};

enum class ModelMode { Oracle, Learned };

struct ModelConfig {
  ModelMode mode = ModelMode::Oracle;
  double fidelity_noise = 0.0;  // sigma (kW) on predicted exogenous quantities

  void validate() const;
};

// Computes every agent's noise-free action for a predicted state.
using RolloutPolicy = std::function<double(int agent, const Observation& obs)>;

// The collaborative global model f_sim: per-agent battery/presence predictors
// plus a shared grid predictor, used for the short-horizon value baseline.
// In oracle mode the predictors clone the simulator's dynamics with the
// profile means as the exogenous forecast; in learned mode the battery
// coefficients and hourly grid forecasts are fit online from observed data.
class SimModel {
 public:
  SimModel(ModelConfig cfg, GridConfig grid, std::vector<EvProfile> profiles, RewardConfig reward);

  int n_agents() const { return static_cast<int>(profiles_.size()); }

  // One predicted step: advances the snapshot in place and returns the
  // per-agent predicted rewards for that step.
  std::vector<double> predict_step(GridSnapshot& snap, const std::vector<double>& joint_action,
                                   Rng& rng) const;

  // Per-agent discounted sum of predicted rewards over k_prime steps. The
  // first step applies `first_action`; later steps query `policy` on the
  // predicted observations. k_prime = 0 returns zeros and draws no noise.
  std::vector<double> rollout(GridSnapshot snap, const std::vector<double>& first_action,
                              int k_prime, double gamma, const RolloutPolicy& policy,
                              Rng& rng) const;

  // Online fitting hooks for learned mode (no-ops in oracle mode).
  void observe_transition(int agent, const Observation& obs, double action_kw,
                          const Observation& next_obs);
  void observe_grid(int hour, double base_load_kw, double renewable_kw);

  const ModelConfig& config() const { return cfg_; }
  // Learned battery coefficients [charge, discharge] for tests.
  std::vector<double> battery_coefficients(int agent) const;

 private:
  double forecast_base(double hour) const;
  double forecast_renewable(double hour) const;
  double predict_soc_next(int agent, double soc, double a_kw) const;

  ModelConfig cfg_;
  GridConfig grid_;
  std::vector<EvProfile> profiles_;
  RewardConfig reward_;

  // Learned mode state: per-agent least squares for
  //   delta_soc = c_chg * max(a,0) + c_dis * min(a,0)
  struct BatteryFit {
    double s_cc = 0.0, s_cd = 0.0, s_dd = 0.0;  // normal equations
    double s_cy = 0.0, s_dy = 0.0;
    std::int64_t n = 0;
  };
  std::vector<BatteryFit> fits_;
  std::vector<double> hour_base_sum_, hour_renew_sum_;
  std::vector<std::int64_t> hour_count_;
};

}  // namespace v2g
