#pragma once

#include <span>
#include <vector>

#include "v2g/ev.hpp"
#include "v2g/grid_env.hpp"

namespace v2g {

struct RewardConfig {
  double w_global = 0.5;  // weight of the shared global component
  double alpha = 0.05;    // scales the grid-draw variance term
  double beta = 1.0;      // scales the renewable utilisation term
  double c_success = 10.0;
  double c_fail = 10.0;

  void validate() const;
};

// Shared component: -alpha * Var(window) + beta * used/available. When nothing
// is available the ratio is defined as 1 (nothing was wasted).
double global_reward(std::span<const double> p_grid_window, double used, double available,
                     const RewardConfig& cfg);

// Immediate economic outcome. The environment signs actions positive for
// charging; the tariff convention pays for discharging, so the flow is negated
// here: revenue = price * (-a) * dt.
double revenue_reward(double price, double a_kw, double dt_h);

// Terminal satisfaction component, applied once per agent at departure.
double soc_terminal_reward(double final_soc, double soc_target, const RewardConfig& cfg);

// w_soc * terminal + (1 - w_soc) * revenue.
double local_reward(double terminal_component, double revenue_component, double w_soc);

// w_global * r_global + (1 - w_global) * r_local.
double combine(double r_global, double r_local, double w_global);

// Full per-agent reward vector for one step. EVs away for the whole step get
// 0; departing EVs receive their terminal component on the departure step.
std::vector<double> step_rewards(const StepRecord& rec, const std::vector<EvProfile>& profiles,
                                 const RewardConfig& cfg, double dt_h = 1.0);

}  // namespace v2g
