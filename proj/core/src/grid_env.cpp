#include "v2g/grid_env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace v2g {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double LoadProfile::mean_at(double hour) const {
  double h = std::fmod(hour, 24.0);
  if (h < 0.0) h += 24.0;
  switch (kind) {
    case Kind::Sinusoid:
      return std::max(0.0, mean_kw + amplitude_kw * std::cos(2.0 * kPi * (h - peak_hour) / 24.0));
    case Kind::Solar: {
      if (h <= sunrise_hour || h >= sunset_hour) return 0.0;
      const double x = (h - sunrise_hour) / (sunset_hour - sunrise_hour);
      return peak_kw * std::sin(kPi * x);
    }
    case Kind::Trace:
      return trace_kw.at(static_cast<std::size_t>(h) % trace_kw.size());
  }
  return 0.0;
}

void LoadProfile::validate() const {
  if (noise_sigma_kw < 0.0) throw std::invalid_argument("profile: negative noise sigma");
  switch (kind) {
    case Kind::Sinusoid:
      if (mean_kw < 0.0) throw std::invalid_argument("profile: negative mean");
      break;
    case Kind::Solar:
      if (peak_kw < 0.0) throw std::invalid_argument("profile: negative peak");
      if (sunset_hour <= sunrise_hour)
        throw std::invalid_argument("profile: sunset must be after sunrise");
      break;
    case Kind::Trace:
      if (trace_kw.size() != 24)
        throw std::invalid_argument("profile: trace must have 24 hourly values");
      for (double v : trace_kw)
        if (!(v >= 0.0)) throw std::invalid_argument("profile: trace values must be >= 0");
      break;
  }
}

std::vector<double> load_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace csv: " + path);
  std::vector<double> values(24, -1.0);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string hour_s, kw_s;
    if (!std::getline(ls, hour_s, ',') || !std::getline(ls, kw_s)) continue;
    if (first) {
      first = false;
      // optional header
      try {
        (void)std::stod(hour_s);
      } catch (...) {
        continue;
      }
    }
    const int h = std::stoi(hour_s);
    if (h < 0 || h > 23) throw std::runtime_error("trace csv: hour out of range");
    values.at(h) = std::stod(kw_s);
  }
  for (int h = 0; h < 24; ++h)
    if (values[h] < 0.0)
      throw std::runtime_error("trace csv: missing hour " + std::to_string(h));
  return values;
}

void GridConfig::validate() const {
  base_load.validate();
  renewable.validate();
  pricing.validate();
  if (window_steps < 1) throw std::invalid_argument("grid: window_steps must be >= 1");
  if (load_norm_kw <= 0.0) throw std::invalid_argument("grid: load_norm_kw must be > 0");
}

void FleetConfig::validate() const {
  capacity_kwh.validate();
  arrival_hour.validate();
  departure_hour.validate();
  trip_energy_kwh.validate();
  initial_soc.validate();
  if (max_charge_kw <= 0.0 || max_discharge_kw <= 0.0)
    throw std::invalid_argument("fleet: rates must be > 0");
  if (eta_charge <= 0.0 || eta_charge > 1.0 || eta_discharge <= 0.0 || eta_discharge > 1.0)
    throw std::invalid_argument("fleet: efficiencies must be in (0,1]");
  if (trip_energy_kwh.min_possible() < 0.0)
    throw std::invalid_argument("fleet: trip energy must be >= 0");
  if (departure_hour.max_possible() <= arrival_hour.min_possible())
    throw std::invalid_argument("fleet: departure cannot exceed arrival");
  if (soc_target < 0.0 || soc_target > 1.0 || w_soc < 0.0 || w_soc > 1.0)
    throw std::invalid_argument("fleet: soc_target and w_soc must be in [0,1]");
}

GridEnv::GridEnv(GridConfig grid, FleetConfig fleet, int n_agents, Rng& rng)
    : grid_(std::move(grid)), fleet_(std::move(fleet)) {
  grid_.validate();
  fleet_.validate();
  if (n_agents < 0) throw std::invalid_argument("env: n_agents must be >= 0");
  profiles_.reserve(n_agents);
  for (int i = 0; i < n_agents; ++i) profiles_.push_back(sample_ev_profile(rng, fleet_));
  states_.resize(n_agents);
  schedules_.resize(n_agents);
  reset(rng);
}

void GridEnv::reset(Rng& rng) {
  t_ = 0;
  window_.clear();
  for (std::size_t i = 0; i < profiles_.size(); ++i) {
    schedules_[i] = sample_day_schedule(rng, profiles_[i], fleet_.initial_soc);
    states_[i] = EvState{schedules_[i].initial_soc, false, 0, false};
  }
  sample_exogenous(rng);
  process_arrivals();
}

void GridEnv::sample_exogenous(Rng& rng) {
  const double h = static_cast<double>(t_);
  // Two draws per step regardless of sigma keeps streams aligned across configs.
  const double zb = rng.normal();
  const double zr = rng.normal();
  base_now_ = std::max(0.0, grid_.base_load.mean_at(h) + grid_.base_load.noise_sigma_kw * zb);
  renew_now_ = std::max(0.0, grid_.renewable.mean_at(h) + grid_.renewable.noise_sigma_kw * zr);
}

void GridEnv::process_arrivals() {
  for (std::size_t i = 0; i < profiles_.size(); ++i) {
    auto& ev = states_[i];
    const auto& day = schedules_[i];
    if (!ev.plugged && !ev.departed && day.arrival_hour == t_) {
      ev.plugged = true;
      ev.soc = std::max(0.0, ev.soc - day.trip_energy_kwh / profiles_[i].battery_capacity);
      ev.t_etd = day.departure_hour - t_;
    }
  }
}

Observation GridEnv::observe(int agent) const {
  const auto& ev = states_.at(agent);
  Observation o;
  o.soc = ev.soc;
  o.t_etd = ev.plugged ? static_cast<double>(ev.t_etd) : 0.0;
  o.soc_target = profiles_[agent].soc_target;
  o.price_now = price_at(grid_.pricing, t_);
  o.renewable_available = renew_now_;
  o.base_load = base_now_;
  o.plugged = ev.plugged ? 1.0 : 0.0;
  o.hour = static_cast<double>(t_);
  o.grid_window = window_;
  return o;
}

std::vector<Observation> GridEnv::observe_all() const {
  std::vector<Observation> out;
  out.reserve(profiles_.size());
  for (int i = 0; i < n_agents(); ++i) out.push_back(observe(i));
  return out;
}

StepRecord GridEnv::step(const std::vector<double>& joint_action, Rng& rng) {
  if (episode_done()) throw std::logic_error("env: step after episode end");
  if (joint_action.size() != profiles_.size())
    throw std::invalid_argument("env: joint action size mismatch");

  const int n = n_agents();
  StepRecord rec;
  rec.episode_step = t_;
  rec.hour = t_;
  rec.price = price_at(grid_.pricing, t_);
  rec.base_load = base_now_;
  rec.renewable_available = renew_now_;
  rec.action_kw.assign(n, 0.0);
  rec.realized_kw.assign(n, 0.0);
  rec.active.assign(n, 0);

  double total_charge = 0.0, total_discharge = 0.0;
  for (int i = 0; i < n; ++i) {
    double a = joint_action[i];
    if (!std::isfinite(a)) throw std::invalid_argument("env: non-finite action");
    auto& ev = states_[i];
    if (!ev.plugged) {
      if (a != 0.0) ++clamp_warnings_;
      continue;
    }
    const auto& prof = profiles_[i];
    const double clamped = std::clamp(a, -prof.a_max_discharge, prof.a_max_charge);
    if (clamped != a) ++clamp_warnings_;
    auto upd = soc_update(ev, prof, clamped, kDtHours);
    ev = upd.next;
    rec.action_kw[i] = clamped;
    rec.realized_kw[i] = upd.realized_kw;
    rec.active[i] = 1;
    total_charge += std::max(upd.realized_kw, 0.0);
    total_discharge += std::max(-upd.realized_kw, 0.0);
  }

  const double net_demand = base_now_ + total_charge - total_discharge;
  rec.total_charge = total_charge;
  rec.total_discharge = total_discharge;
  rec.renewable_used = std::min(renew_now_, std::max(net_demand, 0.0));
  rec.p_grid = std::max(net_demand - rec.renewable_used, 0.0);
  rec.curtailed = renew_now_ - rec.renewable_used;

  window_.push_back(rec.p_grid);
  if (window_.size() > static_cast<std::size_t>(grid_.window_steps))
    window_.erase(window_.begin());
  rec.window_after = window_;

  // Departures at the end of the hour: the terminal SoC is what this step's
  // charging produced, and the transition stored for this step is terminal.
  for (int i = 0; i < n; ++i) {
    auto& ev = states_[i];
    if (ev.plugged && schedules_[i].departure_hour == t_ + 1) {
      rec.departures.push_back({i, ev.soc, profiles_[i].soc_target});
      ev.plugged = false;
      ev.departed = true;
      ev.t_etd = 0;
    } else if (ev.plugged) {
      ev.t_etd = schedules_[i].departure_hour - (t_ + 1);
    }
  }

  ++t_;
  if (!episode_done()) {
    sample_exogenous(rng);
    process_arrivals();
  }
  return rec;
}

void observation_features(const Observation& obs, const FeatureSpec& spec, double* out) {
  const double norm = spec.load_norm_kw;
  int k = 0;
  out[k++] = obs.soc;
  out[k++] = obs.t_etd / 24.0;
  out[k++] = obs.soc_target;
  out[k++] = obs.price_now;
  out[k++] = obs.renewable_available / norm;
  out[k++] = obs.base_load / norm;
  out[k++] = obs.plugged;
  out[k++] = obs.hour / 24.0;
  // Slot j holds the j-th most recent window value so slot meaning is stable
  // while the window fills up at episode start.
  const int w = spec.window_steps;
  const int len = std::min<int>(static_cast<int>(obs.grid_window.size()), w);
  for (int j = 0; j < w; ++j)
    out[k++] = j < len ? obs.grid_window[obs.grid_window.size() - 1 - j] / norm : 0.0;
  out[k++] = static_cast<double>(len) / static_cast<double>(w);
}

std::vector<double> observation_features(const Observation& obs, const FeatureSpec& spec) {
  std::vector<double> out(spec.dim());
  observation_features(obs, spec, out.data());
  return out;
}

}  // namespace v2g
