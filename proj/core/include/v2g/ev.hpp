#pragma once

#include "v2g/rng.hpp"

namespace v2g {

// Scalar sampling distribution with clamping. Point-mass, uniform or normal.
struct ScalarDist {
  enum class Kind { Point, Uniform, Normal };
  Kind kind = Kind::Point;
  double a = 0.0;  // point value / uniform lo / normal mean
  double b = 0.0;  // uniform hi / normal sigma
  double lo = -1e300;
  double hi = 1e300;

  double sample(Rng& rng) const;
  double min_possible() const;
  double max_possible() const;
  void validate() const;

  static ScalarDist point(double v) { return {Kind::Point, v, 0.0, v, v}; }
  static ScalarDist uniform(double lo, double hi) { return {Kind::Uniform, lo, hi, lo, hi}; }
  static ScalarDist normal(double mean, double sigma, double lo, double hi) {
    return {Kind::Normal, mean, sigma, lo, hi};
  }
};

// Static parameters of one EV: battery, rates, efficiencies and the stochastic
// behavioural profile its daily schedule is drawn from.
struct EvProfile {
  double battery_capacity = 50.0;  // kWh
  double a_max_charge = 7.0;       // kW, grid-side
  double a_max_discharge = 7.0;    // kW, grid-side
  double eta_charge = 0.95;
  double eta_discharge = 0.95;
  ScalarDist arrival_hour_dist = ScalarDist::point(0.0);
  ScalarDist departure_hour_dist = ScalarDist::point(24.0);
  ScalarDist trip_energy_dist = ScalarDist::point(0.0);
  double soc_target = 0.8;
  double w_soc = 0.5;

  void validate() const;
};

// Live state of one EV inside an episode.
struct EvState {
  double soc = 0.5;      // fraction of capacity, always in [0,1]
  bool plugged = false;
  int t_etd = 0;         // hours until scheduled departure; 0 when away
  bool departed = false; // departed this episode
};

// One day's realized schedule, drawn from the profile distributions.
struct DaySchedule {
  int arrival_hour = 0;    // in [0,23]
  int departure_hour = 24; // in [arrival+1, 24]; departs at end of hour-1
  double trip_energy_kwh = 0.0;
  double initial_soc = 0.5;
};

struct SocUpdateResult {
  EvState next;
  double realized_kw = 0.0;       // grid-side flow actually achieved (action sign)
  double battery_delta_kwh = 0.0; // signed battery energy change
};

// Battery update for one step. `a_kw` is the grid-side power flow, positive
// when charging. The SoC is clamped to [0,1] and the realized flow is reduced
// when the clamp binds, so no phantom energy enters the balance.
SocUpdateResult soc_update(const EvState& ev, const EvProfile& profile, double a_kw, double dt_h);

// Draws a profile from fleet-level distributions; see FleetConfig in grid_env.
struct FleetConfig;
EvProfile sample_ev_profile(Rng& rng, const FleetConfig& fleet);

// Draws one day's arrival/departure/trip/initial-soc realization. Departure is
// forced strictly after arrival.
DaySchedule sample_day_schedule(Rng& rng, const EvProfile& profile, const ScalarDist& initial_soc);

}  // namespace v2g
