#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "v2g/ev.hpp"
#include "v2g/pricing.hpp"
#include "v2g/rng.hpp"

namespace v2g {

// Exogenous daily profile: sinusoidal base load, solar-shaped renewable, or a
// fixed 24-value trace loaded from CSV. mean_at() gives the noise-free value.
struct LoadProfile {
  enum class Kind { Sinusoid, Solar, Trace };
  Kind kind = Kind::Sinusoid;
  // Sinusoid
  double mean_kw = 30.0;
  double amplitude_kw = 10.0;
  double peak_hour = 19.0;
  // Solar
  double peak_kw = 60.0;
  double sunrise_hour = 6.0;
  double sunset_hour = 18.0;
  // Trace (one value per hour)
  std::vector<double> trace_kw;

  double noise_sigma_kw = 0.0;

  double mean_at(double hour) const;
  void validate() const;
};

// Loads a profile trace from CSV with columns hour,kW (24 rows, hours 0..23).
std::vector<double> load_trace_csv(const std::string& path);

struct GridConfig {
  LoadProfile base_load;
  LoadProfile renewable;
  PricingSchedule pricing = PricingSchedule::shenzhen_default();
  int window_steps = 6;       // trailing Var(P_grid) window
  double load_norm_kw = 60.0; // normalizer for observation features

  void validate() const;
};

struct FleetConfig {
  ScalarDist capacity_kwh = ScalarDist::uniform(40.0, 60.0);
  double max_charge_kw = 7.0;
  double max_discharge_kw = 7.0;
  double eta_charge = 0.95;
  double eta_discharge = 0.95;
  ScalarDist arrival_hour = ScalarDist::normal(8.5, 1.0, 5.0, 11.0);
  ScalarDist departure_hour = ScalarDist::normal(17.5, 1.0, 14.0, 23.0);
  ScalarDist trip_energy_kwh = ScalarDist::uniform(5.0, 12.0);
  ScalarDist initial_soc = ScalarDist::uniform(0.3, 0.5);
  double soc_target = 0.8;
  double w_soc = 0.5;

  void validate() const;
};

// Per-agent local state vector. Shared grid fields (price, loads, hour and the
// trailing P_grid window) are replicated into every agent's observation so a
// global snapshot can be reassembled from stored observations alone.
struct Observation {
  double soc = 0.0;
  double t_etd = 0.0;       // hours; 0 when away
  double soc_target = 0.0;
  double price_now = 0.0;
  double renewable_available = 0.0;  // kW
  double base_load = 0.0;            // kW
  double plugged = 0.0;              // 0/1
  double hour = 0.0;                 // 0..23
  std::vector<double> grid_window;   // trailing p_grid values, most recent last
};

// Everything a step produced that metrics and rewards need.
struct StepRecord {
  int episode_step = 0;  // 0..23
  int hour = 0;
  double price = 0.0;
  double base_load = 0.0;
  double renewable_available = 0.0;
  double renewable_used = 0.0;
  double p_grid = 0.0;
  double curtailed = 0.0;
  double total_charge = 0.0;     // sum of realized charging kW
  double total_discharge = 0.0;  // sum of realized discharging kW
  std::vector<double> action_kw;    // executed (bounds-clamped) commands
  std::vector<double> realized_kw;  // physical flows after SoC clamping
  std::vector<std::uint8_t> active; // EV was plugged during this step
  struct Departure {
    int agent = 0;
    double final_soc = 0.0;
    double target = 0.0;
  };
  std::vector<Departure> departures;  // EVs that left at the end of this step
  std::vector<double> window_after;   // trailing window including this step
};

// Deterministic, seeded discrete-event model of a small distribution grid with
// one renewable source, a main-grid connection and N plug-in EVs. All
// randomness flows through the Rng arguments; the object is copyable so tests
// can clone a mid-episode state and replay it.
class GridEnv {
 public:
  static constexpr int kStepsPerEpisode = 24;
  static constexpr double kDtHours = 1.0;

  GridEnv(GridConfig grid, FleetConfig fleet, int n_agents, Rng& rng);

  void reset(Rng& rng);
  Observation observe(int agent) const;
  std::vector<Observation> observe_all() const;

  // Advances one hour. Out-of-bounds actions are clamped (and counted);
  // non-finite actions are rejected.
  StepRecord step(const std::vector<double>& joint_action, Rng& rng);

  bool episode_done() const { return t_ >= kStepsPerEpisode; }
  int t() const { return t_; }
  int n_agents() const { return static_cast<int>(profiles_.size()); }
  const EvProfile& profile(int agent) const { return profiles_.at(agent); }
  const std::vector<EvProfile>& profiles() const { return profiles_; }
  const EvState& ev_state(int agent) const { return states_.at(agent); }
  const DaySchedule& schedule(int agent) const { return schedules_.at(agent); }
  const std::vector<double>& grid_window() const { return window_; }
  const GridConfig& grid_config() const { return grid_; }
  std::uint64_t clamp_warnings() const { return clamp_warnings_; }

 private:
  void sample_exogenous(Rng& rng);
  void process_arrivals();

  GridConfig grid_;
  FleetConfig fleet_;
  std::vector<EvProfile> profiles_;
  std::vector<EvState> states_;
  std::vector<DaySchedule> schedules_;
  std::vector<double> window_;
  double base_now_ = 0.0;
  double renew_now_ = 0.0;
  int t_ = 0;
  std::uint64_t clamp_warnings_ = 0;
};

// ---- observation featurization ----------------------------------------

// Fixed feature layout consumed by the neural policies/critics:
// [soc, t_etd/24, soc_target, price, renew/norm, base/norm, plugged, hour/24,
//  window (W slots, /norm, zero padded), window_len/W]
struct FeatureSpec {
  double load_norm_kw = 60.0;
  int window_steps = 6;

  int dim() const { return 8 + window_steps + 1; }
};

void observation_features(const Observation& obs, const FeatureSpec& spec, double* out);
std::vector<double> observation_features(const Observation& obs, const FeatureSpec& spec);

}  // namespace v2g
