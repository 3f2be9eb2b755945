// v2g: command-line front end for the V2G coordination testbed.
//   run       - train one algorithm and evaluate it
//   sweep     - parameter sweep with derived seeds, parallel jobs
//   check     - recompute summary metrics from a run's CSVs
//   netscale  - accounting-only communication scaling sweep

#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "v2g/experiment.hpp"

namespace {

v2g::ExperimentConfig base_config(const std::string& config_path) {
  if (config_path.empty()) return v2g::ExperimentConfig::defaults();
  return v2g::load_config(config_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"V2G coordination testbed (IL / MADDPG / DT-MADDPG)"};
  app.require_subcommand(1);

  // ---- run ----
  std::string run_config, run_algo, run_out, run_eval_checkpoint;
  int run_agents = -1, run_episodes = -1, run_eval_episodes = -1, run_ckpt_every = -1;
  std::int64_t run_seed = -1;
  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("--config", run_config, "JSON config file");
  run->add_option("--algo", run_algo, "il | maddpg | dt-maddpg");
  run->add_option("--agents", run_agents, "Number of EV agents");
  run->add_option("--episodes", run_episodes, "Training episodes");
  run->add_option("--seed", run_seed, "Master seed");
  run->add_option("--out", run_out, "Output directory");
  run->add_option("--eval-episodes", run_eval_episodes, "Evaluation episodes");
  run->add_option("--checkpoint-every", run_ckpt_every, "Checkpoint period (episodes)");
  run->add_option("--eval-checkpoint", run_eval_checkpoint,
                  "Skip training; evaluate networks from this checkpoint");

  // ---- sweep ----
  std::string sweep_config, sweep_param = "w_revenue", sweep_values_s = "0.2,0.4,0.6,0.8";
  std::string sweep_out = "out/sweep", sweep_algo;
  int sweep_seeds = 5, sweep_jobs = 0, sweep_agents = -1, sweep_episodes = -1;
  std::int64_t sweep_seed = -1;
  auto* sweep = app.add_subcommand("sweep", "Sensitivity sweep over one parameter");
  sweep->add_option("--config", sweep_config, "JSON config file");
  sweep->add_option("--param", sweep_param, "w_revenue | w_soc | w_global | k_prime | fidelity_noise");
  sweep->add_option("--values", sweep_values_s, "Comma-separated values");
  sweep->add_option("--seeds", sweep_seeds, "Seeds per value");
  sweep->add_option("--jobs", sweep_jobs, "Parallel jobs (0 = hardware)");
  sweep->add_option("--algo", sweep_algo, "il | maddpg | dt-maddpg");
  sweep->add_option("--agents", sweep_agents, "Number of EV agents");
  sweep->add_option("--episodes", sweep_episodes, "Training episodes");
  sweep->add_option("--seed", sweep_seed, "Base seed");
  sweep->add_option("--out", sweep_out, "Output directory");

  // ---- check ----
  std::string check_dir;
  auto* check = app.add_subcommand("check", "Cross-check a run's summary against its CSVs");
  check->add_option("--out", check_dir, "Run directory")->required();

  // ---- netscale ----
  std::string ns_agents_s = "10,20,40,80", ns_out = "out/messages_vs_n.csv";
  int ns_steps = 200, ns_m0 = 3, ns_m = 2, ns_sync = 24;
  std::int64_t ns_seed = 42;
  auto* netscale = app.add_subcommand("netscale", "Accounting-only message scaling sweep");
  netscale->add_option("--agents", ns_agents_s, "Comma-separated agent counts");
  netscale->add_option("--steps", ns_steps, "Accounting steps per point");
  netscale->add_option("--seed", ns_seed, "Topology seed");
  netscale->add_option("--out", ns_out, "Output CSV path");
  netscale->add_option("--m0", ns_m0, "BA initial clique size");
  netscale->add_option("--m", ns_m, "BA edges per new node");
  netscale->add_option("--sync-period", ns_sync, "Steps between parameter/model syncs");

  CLI11_PARSE(app, argc, argv);

  auto parse_list_d = [](const std::string& s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
      std::size_t next = s.find(',', pos);
      if (next == std::string::npos) next = s.size();
      out.push_back(std::stod(s.substr(pos, next - pos)));
      pos = next + 1;
    }
    return out;
  };

  try {
    if (*run) {
      v2g::ExperimentConfig cfg = base_config(run_config);
      if (!run_algo.empty()) cfg.algorithm = v2g::algo_from_name(run_algo);
      if (run_agents >= 0) cfg.n_agents = run_agents;
      if (run_episodes >= 0) cfg.episodes = run_episodes;
      if (run_seed >= 0) cfg.seed = static_cast<std::uint64_t>(run_seed);
      if (!run_out.empty()) cfg.out_dir = run_out;
      if (run_eval_episodes >= 0) cfg.eval_episodes = run_eval_episodes;
      if (run_ckpt_every >= 0) cfg.checkpoint_every = run_ckpt_every;
      if (!run_eval_checkpoint.empty()) cfg.eval_checkpoint = run_eval_checkpoint;
      const auto m = v2g::run_experiment(cfg);
      std::printf("algorithm              %s\n", v2g::algo_name(cfg.algorithm).c_str());
      std::printf("renewable utilisation  %.2f %%\n", m.renewable_utilisation_pct);
      std::printf("owner goal success     %.2f %%\n", m.owner_goal_success_rate_pct);
      std::printf("aggregated revenue     %.4f\n", m.aggregated_user_revenue);
      std::printf("fossil variance        %.4f\n", m.fossil_variance);
      std::printf("fossil energy (eval)   %.2f kWh\n", m.p_grid_total_kwh);
      std::printf("messages per step      %.3f\n", m.messages_per_step);
      std::printf("outputs in             %s\n", cfg.out_dir.c_str());
    } else if (*sweep) {
      v2g::ExperimentConfig cfg = base_config(sweep_config);
      if (!sweep_algo.empty()) cfg.algorithm = v2g::algo_from_name(sweep_algo);
      if (sweep_agents >= 0) cfg.n_agents = sweep_agents;
      if (sweep_episodes >= 0) cfg.episodes = sweep_episodes;
      if (sweep_seed >= 0) cfg.seed = static_cast<std::uint64_t>(sweep_seed);
      const int jobs = sweep_jobs > 0 ? sweep_jobs
                                      : static_cast<int>(std::thread::hardware_concurrency());
      const auto points = v2g::run_sweep(cfg, sweep_param, parse_list_d(sweep_values_s),
                                         sweep_seeds, sweep_out, jobs);
      std::printf("%-12s %-8s %-10s %-12s %-12s\n", "value", "seed", "util%", "success%",
                  "revenue");
      for (const auto& p : points)
        std::printf("%-12g %-8llu %-10.2f %-12.2f %-12.4f\n", p.value,
                    static_cast<unsigned long long>(p.seed),
                    p.summary.renewable_utilisation_pct,
                    p.summary.owner_goal_success_rate_pct, p.summary.aggregated_user_revenue);
      std::printf("sweep.csv written to %s\n", sweep_out.c_str());
    } else if (*check) {
      std::string report;
      const bool ok = v2g::check_run_outputs(check_dir, report);
      if (!report.empty()) std::fputs(report.c_str(), stdout);
      std::printf("%s\n", ok ? "OK: summary matches CSVs" : "FAIL: discrepancies found");
      return ok ? 0 : 1;
    } else if (*netscale) {
      std::vector<int> counts;
      for (double v : parse_list_d(ns_agents_s)) counts.push_back(static_cast<int>(v));
      v2g::CommsConfig cc;
      cc.m0 = ns_m0;
      cc.m = ns_m;
      cc.sync_period = ns_sync;
      const auto points = v2g::run_netscale(counts, ns_steps, static_cast<std::uint64_t>(ns_seed),
                                            cc, ns_out);
      std::printf("%-10s %-8s %-16s %-16s\n", "algo", "N", "msgs/step", "msgs/agent/step");
      for (const auto& p : points)
        std::printf("%-10s %-8d %-16.3f %-16.3f\n", p.algo.c_str(), p.n_agents,
                    p.messages_per_step, p.messages_per_agent_per_step);
      std::printf("written to %s\n", ns_out.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
