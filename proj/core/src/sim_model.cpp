#include "v2g/sim_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace v2g {

void ModelConfig::validate() const {
  if (fidelity_noise < 0.0)
    throw std::invalid_argument("model: fidelity_noise must be >= 0");
}

GridSnapshot GridSnapshot::from_observations(const std::vector<Observation>& obs) {
  if (obs.empty()) throw std::invalid_argument("snapshot: no observations");
  GridSnapshot s;
  s.hour = obs.front().hour;
  s.base_load = obs.front().base_load;
  s.renewable = obs.front().renewable_available;
  s.window = obs.front().grid_window;
  s.agents.reserve(obs.size());
  for (const auto& o : obs) {
    GridSnapshot::AgentState a;
    a.soc = o.soc;
    a.t_etd = static_cast<int>(std::lround(o.t_etd));
    a.soc_target = o.soc_target;
    a.plugged = o.plugged > 0.5;
    s.agents.push_back(a);
  }
  return s;
}

Observation GridSnapshot::observation_of(int agent, const PricingSchedule& pricing) const {
  const auto& a = agents.at(agent);
  Observation o;
  o.soc = a.soc;
  o.t_etd = a.plugged ? static_cast<double>(a.t_etd) : 0.0;
  o.soc_target = a.soc_target;
  o.price_now = price_at_hour(pricing, hour);
  o.renewable_available = renewable;
  o.base_load = base_load;
  o.plugged = a.plugged ? 1.0 : 0.0;
  o.hour = hour;
  o.grid_window = window;
  return o;
}

SimModel::SimModel(ModelConfig cfg, GridConfig grid, std::vector<EvProfile> profiles,
                   RewardConfig reward)
    : cfg_(cfg), grid_(std::move(grid)), profiles_(std::move(profiles)), reward_(reward) {
  cfg_.validate();
  fits_.resize(profiles_.size());
  hour_base_sum_.assign(24, 0.0);
  hour_renew_sum_.assign(24, 0.0);
  hour_count_.assign(24, 0);
}

double SimModel::forecast_base(double hour) const {
  if (cfg_.mode == ModelMode::Learned) {
    const int h = static_cast<int>(std::fmod(hour, 24.0));
    if (hour_count_[h] > 0) return hour_base_sum_[h] / static_cast<double>(hour_count_[h]);
  }
  return grid_.base_load.mean_at(hour);
}

double SimModel::forecast_renewable(double hour) const {
  if (cfg_.mode == ModelMode::Learned) {
    const int h = static_cast<int>(std::fmod(hour, 24.0));
    if (hour_count_[h] > 0) return hour_renew_sum_[h] / static_cast<double>(hour_count_[h]);
  }
  return grid_.renewable.mean_at(hour);
}

double SimModel::predict_soc_next(int agent, double soc, double a_kw) const {
  if (cfg_.mode == ModelMode::Learned && fits_[agent].n >= 8) {
    const auto& f = fits_[agent];
    // Solve the 2x2 normal equations for [c_chg, c_dis].
    const double det = f.s_cc * f.s_dd - f.s_cd * f.s_cd;
    double c_chg, c_dis;
    if (std::abs(det) > 1e-12) {
      c_chg = (f.s_cy * f.s_dd - f.s_dy * f.s_cd) / det;
      c_dis = (f.s_dy * f.s_cc - f.s_cy * f.s_cd) / det;
    } else if (f.s_cc > 1e-12) {
      c_chg = f.s_cy / f.s_cc;
      c_dis = f.s_dd > 1e-12 ? f.s_dy / f.s_dd : 0.0;
    } else {
      c_chg = 0.0;
      c_dis = f.s_dd > 1e-12 ? f.s_dy / f.s_dd : 0.0;
    }
    return std::clamp(soc + c_chg * std::max(a_kw, 0.0) + c_dis * std::min(a_kw, 0.0), 0.0, 1.0);
  }
  EvState ev;
  ev.soc = soc;
  ev.plugged = true;
  return soc_update(ev, profiles_[agent], a_kw, GridEnv::kDtHours).next.soc;
}

std::vector<double> SimModel::predict_step(GridSnapshot& snap, const std::vector<double>& joint_action,
                                           Rng& rng) const {
  const int n = n_agents();
  if (static_cast<int>(snap.agents.size()) != n || static_cast<int>(joint_action.size()) != n)
    throw std::invalid_argument("predict_step: size mismatch");

  std::vector<double> rewards(n, 0.0);
  // The episode ends at hour 24; beyond it nothing is predicted.
  if (snap.hour >= static_cast<double>(GridEnv::kStepsPerEpisode)) return rewards;

  const double price = price_at_hour(grid_.pricing, snap.hour);
  StepRecord rec;
  rec.hour = static_cast<int>(snap.hour);
  rec.price = price;
  rec.base_load = snap.base_load;
  rec.renewable_available = snap.renewable;
  rec.action_kw.assign(n, 0.0);
  rec.realized_kw.assign(n, 0.0);
  rec.active.assign(n, 0);

  double total_charge = 0.0, total_discharge = 0.0;
  for (int i = 0; i < n; ++i) {
    auto& ag = snap.agents[i];
    if (!ag.plugged || ag.t_etd < 1) continue;
    const auto& prof = profiles_[i];
    const double a = std::clamp(joint_action[i], -prof.a_max_discharge, prof.a_max_charge);
    const double soc_before = ag.soc;
    ag.soc = predict_soc_next(i, ag.soc, a);
    double realized;
    if (cfg_.mode == ModelMode::Oracle) {
      EvState ev;
      ev.soc = soc_before;
      ev.plugged = true;
      realized = soc_update(ev, prof, a, GridEnv::kDtHours).realized_kw;
    } else {
      realized = a;  // learned mode books the commanded flow
    }
    rec.action_kw[i] = a;
    rec.realized_kw[i] = realized;
    rec.active[i] = 1;
    total_charge += std::max(realized, 0.0);
    total_discharge += std::max(-realized, 0.0);
  }

  const double net = snap.base_load + total_charge - total_discharge;
  rec.total_charge = total_charge;
  rec.total_discharge = total_discharge;
  rec.renewable_used = std::min(snap.renewable, std::max(net, 0.0));
  rec.p_grid = std::max(net - rec.renewable_used, 0.0);
  rec.curtailed = snap.renewable - rec.renewable_used;

  snap.window.push_back(rec.p_grid);
  if (snap.window.size() > static_cast<std::size_t>(grid_.window_steps))
    snap.window.erase(snap.window.begin());
  rec.window_after = snap.window;

  // Departures mirror the simulator: an agent with one hour left acts now and
  // leaves at the end of the step, collecting its terminal component.
  for (int i = 0; i < n; ++i) {
    auto& ag = snap.agents[i];
    if (!ag.plugged) continue;
    if (ag.t_etd <= 1) {
      rec.departures.push_back({i, ag.soc, ag.soc_target});
      ag.plugged = false;
      ag.t_etd = 0;
    } else {
      ag.t_etd -= 1;
    }
  }

  rewards = step_rewards(rec, profiles_, reward_, GridEnv::kDtHours);

  snap.hour += 1.0;
  if (snap.hour < static_cast<double>(GridEnv::kStepsPerEpisode)) {
    double base = forecast_base(snap.hour);
    double renew = forecast_renewable(snap.hour);
    if (cfg_.fidelity_noise > 0.0) {
      base += cfg_.fidelity_noise * rng.normal();
      renew += cfg_.fidelity_noise * rng.normal();
    }
    snap.base_load = std::max(0.0, base);
    snap.renewable = std::max(0.0, renew);
  } else {
    snap.base_load = 0.0;
    snap.renewable = 0.0;
  }
  return rewards;
}

std::vector<double> SimModel::rollout(GridSnapshot snap, const std::vector<double>& first_action,
                                      int k_prime, double gamma, const RolloutPolicy& policy,
                                      Rng& rng) const {
  if (k_prime < 0) throw std::invalid_argument("rollout: k_prime must be >= 0");
  const int n = n_agents();
  std::vector<double> r_sim(n, 0.0);
  if (k_prime == 0) return r_sim;

  std::vector<double> action = first_action;
  double discount = 1.0;
  for (int j = 1; j <= k_prime; ++j) {
    const auto rewards = predict_step(snap, action, rng);
    for (int i = 0; i < n; ++i) r_sim[i] += discount * rewards[i];
    discount *= gamma;
    if (j < k_prime) {
      for (int i = 0; i < n; ++i)
        action[i] = policy(i, snap.observation_of(i, grid_.pricing));
    }
  }
  return r_sim;
}

void SimModel::observe_transition(int agent, const Observation& obs, double action_kw,
                                  const Observation& next_obs) {
  if (cfg_.mode != ModelMode::Learned) return;
  if (obs.plugged < 0.5 || next_obs.plugged < 0.5) return;
  // saturated samples carry no information about the linear dynamics
  if (next_obs.soc <= 0.0 || next_obs.soc >= 1.0) return;
  auto& f = fits_.at(agent);
  const double c = std::max(action_kw, 0.0);
  const double d = std::min(action_kw, 0.0);
  const double y = next_obs.soc - obs.soc;
  f.s_cc += c * c;
  f.s_cd += c * d;
  f.s_dd += d * d;
  f.s_cy += c * y;
  f.s_dy += d * y;
  f.n += 1;
}

void SimModel::observe_grid(int hour, double base_load_kw, double renewable_kw) {
  if (cfg_.mode != ModelMode::Learned) return;
  const int h = ((hour % 24) + 24) % 24;
  hour_base_sum_[h] += base_load_kw;
  hour_renew_sum_[h] += renewable_kw;
  hour_count_[h] += 1;
}

std::vector<double> SimModel::battery_coefficients(int agent) const {
  const auto& f = fits_.at(agent);
  const double det = f.s_cc * f.s_dd - f.s_cd * f.s_cd;
  if (std::abs(det) > 1e-12)
    return {(f.s_cy * f.s_dd - f.s_dy * f.s_cd) / det,
            (f.s_dy * f.s_cc - f.s_cy * f.s_cd) / det};
  return {f.s_cc > 1e-12 ? f.s_cy / f.s_cc : 0.0, f.s_dd > 1e-12 ? f.s_dy / f.s_dd : 0.0};
}

}  // namespace v2g
