#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "v2g/config.hpp"
#include "v2g/grid_env.hpp"

namespace v2g {

struct MetricsSummary {
  double renewable_utilisation_pct = 0.0;
  double owner_goal_success_rate_pct = 0.0;
  double aggregated_user_revenue = 0.0;  // over the evaluation phase
  double fossil_variance = 0.0;          // pooled variance of eval p_grid
  double p_grid_total_kwh = 0.0;         // total eval fossil energy
  double mean_eval_reward = 0.0;
  double messages_per_step = 0.0;  // training phase accounting
  double max_node_load_pct = 0.0;
  double gini_node_load = 0.0;
  std::uint64_t total_messages = 0;
  std::uint64_t comm_steps = 0;
  int departures_total = 0;
  int departures_success = 0;
};

// ---- metric primitives -------------------------------------------------

// 100 * sum(renewable_used) / sum(renewable_available); 100 when nothing was
// ever available (consistent with the reward-module convention).
double utilisation_pct(const std::vector<StepRecord>& records);

// 100 * successful departures / departures; 100 when there were none.
double success_rate_pct(const std::vector<StepRecord>& records);

// Sum over agents and steps of the revenue reward on realized flows.
double aggregated_revenue(const std::vector<StepRecord>& records, double dt_h = 1.0);

// ---- orchestration ------------------------------------------------------

// Runs M training episodes plus a noise-free evaluation phase, writes
// stability.csv / training.csv / actions.csv / departures.csv /
// network_load.csv / summary.json (and checkpoints) into cfg.out_dir.
MetricsSummary run_experiment(const ExperimentConfig& cfg);

struct SweepPoint {
  std::string param;
  double value = 0.0;
  std::uint64_t seed = 0;
  std::string run_dir;
  MetricsSummary summary;
};

// Runs every (value, seed) combination as independent jobs (seeds derived as
// base + value_index*1000 + seed_index) and writes sweep.csv.
std::vector<SweepPoint> run_sweep(const ExperimentConfig& base, const std::string& param,
                                  const std::vector<double>& values, int seeds_per_value,
                                  const std::string& out_dir, int jobs);

// Recomputes every summary metric from the CSVs and compares. Returns true
// when everything matches; `report` gets one line per discrepancy.
bool check_run_outputs(const std::string& run_dir, std::string& report);

// Accounting-only communication scaling sweep; writes messages_vs_n.csv.
struct NetScalePoint {
  std::string algo;
  int n_agents = 0;
  std::uint64_t steps = 0;
  std::uint64_t total_messages = 0;
  double messages_per_step = 0.0;
  double messages_per_agent_per_step = 0.0;
};
std::vector<NetScalePoint> run_netscale(const std::vector<int>& agent_counts, int steps,
                                        std::uint64_t seed, const CommsConfig& comms,
                                        const std::string& out_csv);

}  // namespace v2g
