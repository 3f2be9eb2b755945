#include "v2g/reward.hpp"

#include <stdexcept>

#include "v2g/stats.hpp"

namespace v2g {

void RewardConfig::validate() const {
  if (w_global < 0.0 || w_global > 1.0)
    throw std::invalid_argument("reward: w_global must be in [0,1]");
  if (c_success <= 0.0 || c_fail <= 0.0)
    throw std::invalid_argument("reward: c_success and c_fail must be > 0");
  if (alpha < 0.0 || beta < 0.0)
    throw std::invalid_argument("reward: alpha and beta must be >= 0");
}

double global_reward(std::span<const double> p_grid_window, double used, double available,
                     const RewardConfig& cfg) {
  if (p_grid_window.empty())
    throw std::invalid_argument("global_reward: window must be non-empty");
  const double ratio = available > 0.0 ? used / available : 1.0;
  return -cfg.alpha * population_variance(p_grid_window) + cfg.beta * ratio;
}

double revenue_reward(double price, double a_kw, double dt_h) {
  return price * (-a_kw) * dt_h;
}

double soc_terminal_reward(double final_soc, double soc_target, const RewardConfig& cfg) {
  return final_soc >= soc_target ? cfg.c_success : -cfg.c_fail;
}

double local_reward(double terminal_component, double revenue_component, double w_soc) {
  return w_soc * terminal_component + (1.0 - w_soc) * revenue_component;
}

double combine(double r_global, double r_local, double w_global) {
  return w_global * r_global + (1.0 - w_global) * r_local;
}

std::vector<double> step_rewards(const StepRecord& rec, const std::vector<EvProfile>& profiles,
                                 const RewardConfig& cfg, double dt_h) {
  const int n = static_cast<int>(profiles.size());
  const double r_global =
      global_reward(rec.window_after, rec.renewable_used * dt_h, rec.renewable_available * dt_h, cfg);
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (!rec.active[i]) continue;
    double terminal = 0.0;
    for (const auto& d : rec.departures)
      if (d.agent == i) terminal = soc_terminal_reward(d.final_soc, d.target, cfg);
    const double revenue = revenue_reward(rec.price, rec.realized_kw[i], dt_h);
    out[i] = combine(r_global, local_reward(terminal, revenue, profiles[i].w_soc), cfg.w_global);
  }
  return out;
}

}  // namespace v2g
