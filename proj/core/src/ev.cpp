#include "v2g/ev.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "v2g/grid_env.hpp"

namespace v2g {

double ScalarDist::sample(Rng& rng) const {
  double v = 0.0;
  switch (kind) {
    case Kind::Point: v = a; break;
    case Kind::Uniform: v = rng.uniform(a, b); break;
    case Kind::Normal: v = rng.normal(a, b); break;
  }
  return std::clamp(v, lo, hi);
}

double ScalarDist::min_possible() const {
  switch (kind) {
    case Kind::Point: return std::clamp(a, lo, hi);
    case Kind::Uniform: return std::clamp(a, lo, hi);
    case Kind::Normal: return lo;
  }
  return lo;
}

double ScalarDist::max_possible() const {
  switch (kind) {
    case Kind::Point: return std::clamp(a, lo, hi);
    case Kind::Uniform: return std::clamp(b, lo, hi);
    case Kind::Normal: return hi;
  }
  return hi;
}

void ScalarDist::validate() const {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("dist: non-finite parameter");
  if (kind == Kind::Uniform && b < a)
    throw std::invalid_argument("dist: uniform hi < lo");
  if (kind == Kind::Normal && b < 0.0)
    throw std::invalid_argument("dist: negative sigma");
  if (hi < lo) throw std::invalid_argument("dist: clamp hi < lo");
}

void EvProfile::validate() const {
  if (battery_capacity <= 0.0)
    throw std::invalid_argument("ev: battery_capacity must be > 0");
  if (a_max_charge <= 0.0 || a_max_discharge <= 0.0)
    throw std::invalid_argument("ev: charge/discharge rates must be > 0");
  if (eta_charge <= 0.0 || eta_charge > 1.0 || eta_discharge <= 0.0 || eta_discharge > 1.0)
    throw std::invalid_argument("ev: efficiencies must be in (0,1]");
  if (soc_target < 0.0 || soc_target > 1.0)
    throw std::invalid_argument("ev: soc_target must be in [0,1]");
  if (w_soc < 0.0 || w_soc > 1.0)
    throw std::invalid_argument("ev: w_soc must be in [0,1]");
}

SocUpdateResult soc_update(const EvState& ev, const EvProfile& profile, double a_kw, double dt_h) {
  if (!std::isfinite(a_kw)) throw std::invalid_argument("soc_update: non-finite action");
  SocUpdateResult r;
  r.next = ev;
  if (a_kw == 0.0) return r;

  const double cap = profile.battery_capacity;
  const double delta =
      (profile.eta_charge * std::max(a_kw, 0.0) - std::max(-a_kw, 0.0) / profile.eta_discharge) *
      dt_h / cap;
  const double soc_next = std::clamp(ev.soc + delta, 0.0, 1.0);
  r.next.soc = soc_next;
  r.battery_delta_kwh = (soc_next - ev.soc) * cap;
  if (a_kw > 0.0)
    r.realized_kw = r.battery_delta_kwh / (profile.eta_charge * dt_h);
  else
    r.realized_kw = r.battery_delta_kwh * profile.eta_discharge / dt_h;
  return r;
}

EvProfile sample_ev_profile(Rng& rng, const FleetConfig& fleet) {
  fleet.validate();
  EvProfile p;
  p.battery_capacity = fleet.capacity_kwh.sample(rng);
  p.a_max_charge = fleet.max_charge_kw;
  p.a_max_discharge = fleet.max_discharge_kw;
  p.eta_charge = fleet.eta_charge;
  p.eta_discharge = fleet.eta_discharge;
  p.arrival_hour_dist = fleet.arrival_hour;
  p.departure_hour_dist = fleet.departure_hour;
  p.trip_energy_dist = fleet.trip_energy_kwh;
  p.soc_target = fleet.soc_target;
  p.w_soc = fleet.w_soc;
  p.validate();
  return p;
}

DaySchedule sample_day_schedule(Rng& rng, const EvProfile& profile, const ScalarDist& initial_soc) {
  DaySchedule d;
  const double arr = profile.arrival_hour_dist.sample(rng);
  d.arrival_hour = std::clamp(static_cast<int>(std::lround(arr)), 0, 23);
  const double dep = profile.departure_hour_dist.sample(rng);
  d.departure_hour = std::clamp(static_cast<int>(std::lround(dep)), 1, 24);
  if (d.departure_hour <= d.arrival_hour) d.departure_hour = d.arrival_hour + 1;
  d.trip_energy_kwh = profile.trip_energy_dist.sample(rng);
  d.initial_soc = std::clamp(initial_soc.sample(rng), 0.0, 1.0);
  return d;
}

}  // namespace v2g
