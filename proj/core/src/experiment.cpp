#include "v2g/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "v2g/checkpoint.hpp"
#include "v2g/csv.hpp"
#include "v2g/replay.hpp"
#include "v2g/stats.hpp"

namespace v2g {

namespace fs = std::filesystem;
using nlohmann::json;

double utilisation_pct(const std::vector<StepRecord>& records) {
  double used = 0.0, avail = 0.0;
  for (const auto& r : records) {
    used += r.renewable_used;
    avail += r.renewable_available;
  }
  if (avail <= 0.0) return 100.0;
  return 100.0 * used / avail;
}

double success_rate_pct(const std::vector<StepRecord>& records) {
  int total = 0, ok = 0;
  for (const auto& r : records)
    for (const auto& d : r.departures) {
      ++total;
      if (d.final_soc >= d.target) ++ok;
    }
  if (total == 0) return 100.0;
  return 100.0 * static_cast<double>(ok) / static_cast<double>(total);
}

double aggregated_revenue(const std::vector<StepRecord>& records, double dt_h) {
  double total = 0.0;
  for (const auto& r : records)
    for (std::size_t i = 0; i < r.realized_kw.size(); ++i)
      if (r.active[i]) total += revenue_reward(r.price, r.realized_kw[i], dt_h);
  return total;
}

namespace {

struct RunOutputs {
  std::vector<StepRecord> eval_records;
  MetricsSummary summary;
};

double anneal_sigma(const LearnerConfig& lc, std::int64_t step, std::int64_t total_steps) {
  if (total_steps <= 1) return lc.noise_sigma_end;
  const double frac = std::min(1.0, static_cast<double>(step) / static_cast<double>(total_steps - 1));
  return lc.noise_sigma_start + (lc.noise_sigma_end - lc.noise_sigma_start) * frac;
}

json summary_to_json(const MetricsSummary& m) {
  json j;
  j["renewable_utilisation_pct"] = m.renewable_utilisation_pct;
  j["owner_goal_success_rate_pct"] = m.owner_goal_success_rate_pct;
  j["aggregated_user_revenue"] = m.aggregated_user_revenue;
  j["fossil_variance"] = m.fossil_variance;
  j["p_grid_total_kwh"] = m.p_grid_total_kwh;
  j["mean_eval_reward"] = m.mean_eval_reward;
  j["messages_per_step"] = m.messages_per_step;
  j["max_node_load_pct"] = m.max_node_load_pct;
  j["gini_node_load"] = m.gini_node_load;
  j["total_messages"] = m.total_messages;
  j["comm_steps"] = m.comm_steps;
  j["departures_total"] = m.departures_total;
  j["departures_success"] = m.departures_success;
  return j;
}

MetricsSummary summary_from_json(const json& j) {
  MetricsSummary m;
  m.renewable_utilisation_pct = j.at("renewable_utilisation_pct").get<double>();
  m.owner_goal_success_rate_pct = j.at("owner_goal_success_rate_pct").get<double>();
  m.aggregated_user_revenue = j.at("aggregated_user_revenue").get<double>();
  m.fossil_variance = j.at("fossil_variance").get<double>();
  m.p_grid_total_kwh = j.at("p_grid_total_kwh").get<double>();
  m.mean_eval_reward = j.at("mean_eval_reward").get<double>();
  m.messages_per_step = j.at("messages_per_step").get<double>();
  m.max_node_load_pct = j.at("max_node_load_pct").get<double>();
  m.gini_node_load = j.at("gini_node_load").get<double>();
  m.total_messages = j.at("total_messages").get<std::uint64_t>();
  m.comm_steps = j.at("comm_steps").get<std::uint64_t>();
  m.departures_total = j.at("departures_total").get<int>();
  m.departures_success = j.at("departures_success").get<int>();
  return m;
}

}  // namespace

MetricsSummary run_experiment(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  cfg.validate();  // nothing is written unless the config is sound

  fs::create_directories(cfg.out_dir);
  const auto path = [&cfg](const char* name) { return (fs::path(cfg.out_dir) / name).string(); };

  Rng env_rng(derive_seed(cfg.seed, 1));
  Rng init_rng(derive_seed(cfg.seed, 2));
  Rng noise_rng(derive_seed(cfg.seed, 3));
  Rng train_rng(derive_seed(cfg.seed, 4));
  Rng comms_rng(derive_seed(cfg.seed, 5));

  const int n = cfg.n_agents;
  GridEnv env(cfg.grid, cfg.fleet, n, env_rng);

  FeatureSpec spec{cfg.grid.load_norm_kw, cfg.grid.window_steps};
  std::vector<ActionBounds> bounds;
  for (int i = 0; i < n; ++i)
    bounds.push_back({-env.profile(i).a_max_discharge, env.profile(i).a_max_charge});

  std::unique_ptr<Trainer> trainer;
  if (n > 0) trainer = std::make_unique<Trainer>(cfg.learner, spec, bounds, init_rng);

  std::unique_ptr<SimModel> model;
  if (cfg.algorithm == Algo::DT_MADDPG)
    model = std::make_unique<SimModel>(cfg.model, cfg.grid, env.profiles(), cfg.reward);

  std::unique_ptr<CommsNetwork> comms;
  if (cfg.comms.enabled && n > 0) {
    CommsConfig cc = cfg.comms;
    cc.m0 = std::min(cc.m0, n);  // keep small fleets valid: m0 clique of n, plus centre
    cc.m = std::min(cc.m, cc.m0);
    comms = std::make_unique<CommsNetwork>(cfg.algorithm, n, cc, comms_rng);
  }

  ReplayBuffer buffer(cfg.learner.buffer_capacity);

  const bool eval_only = !cfg.eval_checkpoint.empty();
  if (eval_only) {
    if (!trainer) throw std::invalid_argument("eval_checkpoint requires agents");
    restore_trainer(*trainer, load_checkpoint(cfg.eval_checkpoint));
    cfg.episodes = 0;  // straight to the evaluation phase
  }

  CsvWriter stability(path("stability.csv"),
                      {"episode", "step", "phase", "base_load", "renewable_available",
                       "renewable_used", "p_grid", "total_charge", "total_discharge"});
  CsvWriter actions(path("actions.csv"), {"episode", "step", "phase", "agent", "action_kw",
                                          "realized_kw", "price", "reward", "active"});
  CsvWriter departures_csv(path("departures.csv"),
                           {"episode", "step", "phase", "agent", "final_soc", "target", "success"});
  CsvWriter training_csv(path("training.csv"),
                         {"episode", "mean_reward", "critic_loss", "actor_loss"});

  const std::int64_t total_env_steps =
      static_cast<std::int64_t>(cfg.episodes) * GridEnv::kStepsPerEpisode;
  std::int64_t env_step = 0;

  auto write_step_rows = [&](int episode, const char* phase, const StepRecord& rec,
                             const std::vector<double>& rewards) {
    stability.row_mixed({std::to_string(episode), std::to_string(rec.episode_step), phase,
                         CsvWriter::format(rec.base_load), CsvWriter::format(rec.renewable_available),
                         CsvWriter::format(rec.renewable_used), CsvWriter::format(rec.p_grid),
                         CsvWriter::format(rec.total_charge), CsvWriter::format(rec.total_discharge)});
    for (int i = 0; i < n; ++i)
      actions.row_mixed({std::to_string(episode), std::to_string(rec.episode_step), phase,
                         std::to_string(i), CsvWriter::format(rec.action_kw[i]),
                         CsvWriter::format(rec.realized_kw[i]), CsvWriter::format(rec.price),
                         CsvWriter::format(rewards[i]), std::to_string(int(rec.active[i]))});
    for (const auto& d : rec.departures)
      departures_csv.row_mixed({std::to_string(episode), std::to_string(rec.episode_step), phase,
                                std::to_string(d.agent), CsvWriter::format(d.final_soc),
                                CsvWriter::format(d.target),
                                std::to_string(d.final_soc >= d.target ? 1 : 0)});
  };

  // ---- training phase ----
  for (int episode = 0; episode < cfg.episodes; ++episode) {
    if (episode > 0) env.reset(env_rng);
    auto obs = env.observe_all();
    std::vector<double> episode_reward(std::max(n, 1), 0.0);
    double ep_critic_loss = 0.0, ep_actor_loss = 0.0;
    int trained_steps = 0;
    while (!env.episode_done()) {
      const double sigma = anneal_sigma(cfg.learner, env_step, total_env_steps);
      std::vector<double> joint(n, 0.0);
      for (int i = 0; i < n; ++i) joint[i] = trainer->act(i, obs[i], sigma, noise_rng);
      const StepRecord rec = env.step(joint, env_rng);
      const auto rewards = step_rewards(rec, env.profiles(), cfg.reward, GridEnv::kDtHours);
      auto next_obs = env.observe_all();

      if (n > 0) {
        Transition tr;
        tr.obs = obs;
        tr.actions = rec.action_kw;
        tr.rewards = rewards;
        tr.next_obs = next_obs;
        tr.done.resize(n);
        for (int i = 0; i < n; ++i) {
          const bool departed = env.ev_state(i).departed;
          tr.done[i] = (departed || rec.episode_step == GridEnv::kStepsPerEpisode - 1) ? 1 : 0;
        }
        if (model) {
          model->observe_grid(rec.hour, rec.base_load, rec.renewable_available);
          for (int i = 0; i < n; ++i)
            model->observe_transition(i, obs[i], rec.action_kw[i], next_obs[i]);
        }
        buffer.push(std::move(tr));
        if (env_step % cfg.learner.train_period == 0) {
          const auto stats = trainer->train_step(buffer, model.get(), train_rng);
          if (stats.trained) {
            ep_critic_loss += stats.critic_loss;
            ep_actor_loss += stats.actor_loss;
            ++trained_steps;
          }
        }
      }
      if (comms) comms->record_step();

      for (int i = 0; i < n; ++i) episode_reward[i] += rewards[i];
      write_step_rows(episode, "train", rec, rewards);
      obs = std::move(next_obs);
      ++env_step;
    }
    const double mean_reward =
        n > 0 ? std::accumulate(episode_reward.begin(), episode_reward.end(), 0.0) / n : 0.0;
    training_csv.row_mixed({std::to_string(episode), CsvWriter::format(mean_reward),
                            CsvWriter::format(trained_steps ? ep_critic_loss / trained_steps : 0.0),
                            CsvWriter::format(trained_steps ? ep_actor_loss / trained_steps : 0.0)});
    if (trainer && cfg.checkpoint_every > 0 && (episode + 1) % cfg.checkpoint_every == 0) {
      const std::string ck = (fs::path(cfg.out_dir) /
                              ("checkpoint_ep" + std::to_string(episode + 1) + ".json")).string();
      save_checkpoint(ck, *trainer, {env_rng.state(), noise_rng.state(), train_rng.state()});
    }
  }

  // ---- evaluation phase: greedy policies, no training ----
  std::vector<StepRecord> eval_records;
  std::vector<double> eval_reward_sums;
  for (int episode = 0; episode < cfg.eval_episodes; ++episode) {
    env.reset(env_rng);
    auto obs = env.observe_all();
    while (!env.episode_done()) {
      std::vector<double> joint(n, 0.0);
      for (int i = 0; i < n; ++i) joint[i] = trainer->act(i, obs[i], 0.0, noise_rng);
      const StepRecord rec = env.step(joint, env_rng);
      const auto rewards = step_rewards(rec, env.profiles(), cfg.reward, GridEnv::kDtHours);
      write_step_rows(cfg.episodes + episode, "eval", rec, rewards);
      eval_reward_sums.push_back(n > 0
                                     ? std::accumulate(rewards.begin(), rewards.end(), 0.0) / n
                                     : 0.0);
      eval_records.push_back(rec);
      obs = env.observe_all();
    }
  }

  MetricsSummary m;
  m.renewable_utilisation_pct = utilisation_pct(eval_records);
  m.owner_goal_success_rate_pct = success_rate_pct(eval_records);
  m.aggregated_user_revenue = aggregated_revenue(eval_records, GridEnv::kDtHours);
  std::vector<double> p_grid_series;
  for (const auto& r : eval_records) {
    p_grid_series.push_back(r.p_grid);
    m.p_grid_total_kwh += r.p_grid * GridEnv::kDtHours;
    for (const auto& d : r.departures) {
      ++m.departures_total;
      if (d.final_soc >= d.target) ++m.departures_success;
    }
  }
  m.fossil_variance = p_grid_series.empty() ? 0.0 : population_variance(p_grid_series);
  m.mean_eval_reward = eval_reward_sums.empty()
                           ? 0.0
                           : std::accumulate(eval_reward_sums.begin(), eval_reward_sums.end(), 0.0) /
                                 static_cast<double>(eval_reward_sums.size());

  // ---- communication accounting outputs ----
  {
    CsvWriter net_csv(path("network_load.csv"),
                      {"node_id", "degree", "is_central", "originated", "relayed", "terminated",
                       "percent"});
    if (comms) {
      const auto pct = load_distribution(comms->log());
      for (int v = 0; v < comms->topology().n; ++v)
        net_csv.row_mixed({std::to_string(v), std::to_string(comms->topology().degree(v)),
                           std::to_string(v == comms->central_node() ? 1 : 0),
                           std::to_string(comms->log().originated[v]),
                           std::to_string(comms->log().relayed[v]),
                           std::to_string(comms->log().terminated[v]), CsvWriter::format(pct[v])});
      m.messages_per_step = comms->messages_per_step();
      m.total_messages = comms->log().total_messages;
      m.comm_steps = comms->log().steps;
      if (!pct.empty()) {
        m.max_node_load_pct = *std::max_element(pct.begin(), pct.end());
        m.gini_node_load = gini(pct);
      }
    }
  }

  if (trainer)
    save_checkpoint(path("checkpoint.json"), *trainer,
                    {env_rng.state(), noise_rng.state(), train_rng.state()});

  json out;
  out["config"] = json::parse(config_to_json_text(cfg));
  out["metrics"] = summary_to_json(m);
  std::ofstream sf(path("summary.json"));
  sf << out.dump(2) << "\n";
  return m;
}

std::vector<SweepPoint> run_sweep(const ExperimentConfig& base, const std::string& param,
                                  const std::vector<double>& values, int seeds_per_value,
                                  const std::string& out_dir, int jobs) {
  if (values.empty()) throw std::invalid_argument("sweep: no values");
  if (seeds_per_value < 1) throw std::invalid_argument("sweep: seeds_per_value must be >= 1");
  fs::create_directories(out_dir);

  std::vector<SweepPoint> points;
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    for (int si = 0; si < seeds_per_value; ++si) {
      SweepPoint p;
      p.param = param;
      p.value = values[vi];
      p.seed = base.seed + static_cast<std::uint64_t>(vi) * 1000 + static_cast<std::uint64_t>(si);
      std::ostringstream dir;
      dir << param << "_" << values[vi] << "/seed_" << p.seed;
      p.run_dir = (fs::path(out_dir) / dir.str()).string();
      points.push_back(std::move(p));
    }
  }

  std::mutex mu;
  std::size_t next_job = 0;
  const int n_threads = std::max(1, jobs);
  auto worker = [&]() {
    for (;;) {
      std::size_t idx;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next_job >= points.size()) return;
        idx = next_job++;
      }
      ExperimentConfig cfg = apply_sweep_value(base, param, points[idx].value);
      cfg.seed = points[idx].seed;
      cfg.out_dir = points[idx].run_dir;
      points[idx].summary = run_experiment(cfg);
    }
  };
  std::vector<std::thread> threads;
  for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  CsvWriter sweep_csv((fs::path(out_dir) / "sweep.csv").string(),
                      {"param", "value", "seed", "renewable_utilisation_pct",
                       "owner_goal_success_rate_pct", "aggregated_user_revenue", "fossil_variance",
                       "p_grid_total_kwh", "messages_per_step"});
  for (const auto& p : points)
    sweep_csv.row_mixed({p.param, CsvWriter::format(p.value), std::to_string(p.seed),
                         CsvWriter::format(p.summary.renewable_utilisation_pct),
                         CsvWriter::format(p.summary.owner_goal_success_rate_pct),
                         CsvWriter::format(p.summary.aggregated_user_revenue),
                         CsvWriter::format(p.summary.fossil_variance),
                         CsvWriter::format(p.summary.p_grid_total_kwh),
                         CsvWriter::format(p.summary.messages_per_step)});
  return points;
}

bool check_run_outputs(const std::string& run_dir, std::string& report) {
  report.clear();
  std::ostringstream out;
  bool ok = true;
  const auto path = [&run_dir](const char* name) { return (fs::path(run_dir) / name).string(); };

  std::ifstream sf(path("summary.json"));
  if (!sf) {
    report = "missing summary.json";
    return false;
  }
  json j = json::parse(sf);
  const MetricsSummary stored = summary_from_json(j.at("metrics"));
  const int episodes = j.at("config").at("episodes").get<int>();
  const int eval_episodes = j.at("config").at("eval_episodes").get<int>();
  const int n_agents = j.at("config").at("n_agents").get<int>();

  auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
  };
  auto expect = [&](const char* name, double got, double want) {
    if (!close(got, want)) {
      out << "mismatch " << name << ": summary " << want << " recomputed " << got << "\n";
      ok = false;
    }
  };

  const CsvTable stability = read_csv(path("stability.csv"));
  const std::size_t want_rows =
      static_cast<std::size_t>(episodes + eval_episodes) * GridEnv::kStepsPerEpisode;
  if (stability.rows.size() != want_rows) {
    out << "stability.csv rows " << stability.rows.size() << " != " << want_rows << "\n";
    ok = false;
  }
  const int c_phase = stability.column_index("phase");
  const int c_used = stability.column_index("renewable_used");
  const int c_avail = stability.column_index("renewable_available");
  const int c_pgrid = stability.column_index("p_grid");
  double used = 0.0, avail = 0.0, p_total = 0.0;
  std::vector<double> p_series;
  for (std::size_t r = 0; r < stability.rows.size(); ++r) {
    if (stability.text(r, c_phase) != "eval") continue;
    used += stability.number(r, c_used);
    avail += stability.number(r, c_avail);
    p_total += stability.number(r, c_pgrid) * GridEnv::kDtHours;
    p_series.push_back(stability.number(r, c_pgrid));
  }
  expect("renewable_utilisation_pct", avail > 0.0 ? 100.0 * used / avail : 100.0,
         stored.renewable_utilisation_pct);
  expect("p_grid_total_kwh", p_total, stored.p_grid_total_kwh);
  expect("fossil_variance", p_series.empty() ? 0.0 : population_variance(p_series),
         stored.fossil_variance);

  const CsvTable deps = read_csv(path("departures.csv"));
  {
    const int c_ph = deps.column_index("phase");
    const int c_success = deps.column_index("success");
    int total = 0, okc = 0;
    for (std::size_t r = 0; r < deps.rows.size(); ++r) {
      if (deps.text(r, c_ph) != "eval") continue;
      ++total;
      okc += deps.number(r, c_success) > 0.5 ? 1 : 0;
    }
    expect("owner_goal_success_rate_pct", total ? 100.0 * okc / total : 100.0,
           stored.owner_goal_success_rate_pct);
    if (total != stored.departures_total) {
      out << "departures_total mismatch\n";
      ok = false;
    }
  }

  const CsvTable acts = read_csv(path("actions.csv"));
  {
    if (acts.rows.size() != want_rows * static_cast<std::size_t>(n_agents) &&
        !(n_agents == 0 && acts.rows.empty())) {
      out << "actions.csv rows " << acts.rows.size() << " != " << want_rows * n_agents << "\n";
      ok = false;
    }
    const int c_ph = acts.column_index("phase");
    const int c_realized = acts.column_index("realized_kw");
    const int c_price = acts.column_index("price");
    const int c_active = acts.column_index("active");
    double revenue = 0.0;
    for (std::size_t r = 0; r < acts.rows.size(); ++r) {
      if (acts.text(r, c_ph) != "eval") continue;
      if (acts.number(r, c_active) < 0.5) continue;
      revenue += revenue_reward(acts.number(r, c_price), acts.number(r, c_realized),
                                GridEnv::kDtHours);
    }
    expect("aggregated_user_revenue", revenue, stored.aggregated_user_revenue);
  }

  const CsvTable net = read_csv(path("network_load.csv"));
  if (!net.rows.empty()) {
    const int c_orig = net.column_index("originated");
    const int c_rel = net.column_index("relayed");
    const int c_term = net.column_index("terminated");
    const int c_pct = net.column_index("percent");
    double total_events = 0.0;
    std::uint64_t total_orig = 0;
    for (std::size_t r = 0; r < net.rows.size(); ++r) {
      total_events += net.number(r, c_orig) + net.number(r, c_rel) + net.number(r, c_term);
      total_orig += static_cast<std::uint64_t>(net.number(r, c_orig));
    }
    if (total_orig != stored.total_messages) {
      out << "total_messages mismatch: csv " << total_orig << " summary " << stored.total_messages
          << "\n";
      ok = false;
    }
    if (stored.comm_steps > 0)
      expect("messages_per_step",
             static_cast<double>(total_orig) / static_cast<double>(stored.comm_steps),
             stored.messages_per_step);
    double pct_sum = 0.0, max_pct = 0.0;
    std::vector<double> pcts;
    for (std::size_t r = 0; r < net.rows.size(); ++r) {
      const double recomputed =
          total_events > 0.0
              ? 100.0 * (net.number(r, c_orig) + net.number(r, c_rel) + net.number(r, c_term)) /
                    total_events
              : 0.0;
      if (!close(recomputed, net.number(r, c_pct))) {
        out << "network_load percent mismatch at node " << r << "\n";
        ok = false;
      }
      pct_sum += net.number(r, c_pct);
      max_pct = std::max(max_pct, net.number(r, c_pct));
      pcts.push_back(net.number(r, c_pct));
    }
    if (total_events > 0.0 && std::abs(pct_sum - 100.0) > 1e-9) {
      out << "network_load percents sum to " << pct_sum << "\n";
      ok = false;
    }
    expect("max_node_load_pct", max_pct, stored.max_node_load_pct);
    if (!pcts.empty()) expect("gini_node_load", gini(pcts), stored.gini_node_load);
  }

  const CsvTable training = read_csv(path("training.csv"));
  if (training.rows.size() != static_cast<std::size_t>(episodes)) {
    out << "training.csv rows " << training.rows.size() << " != " << episodes << "\n";
    ok = false;
  }

  report = out.str();
  return ok;
}

std::vector<NetScalePoint> run_netscale(const std::vector<int>& agent_counts, int steps,
                                        std::uint64_t seed, const CommsConfig& comms,
                                        const std::string& out_csv) {
  std::vector<NetScalePoint> points;
  for (Algo algo : {Algo::MADDPG, Algo::DT_MADDPG}) {
    for (std::size_t i = 0; i < agent_counts.size(); ++i) {
      const int n = agent_counts[i];
      Rng rng(derive_seed(seed, 100 + i));
      CommsNetwork net(algo, n, comms, rng);
      for (int s = 0; s < steps; ++s) net.record_step();
      NetScalePoint p;
      p.algo = algo_name(algo);
      p.n_agents = n;
      p.steps = net.log().steps;
      p.total_messages = net.log().total_messages;
      p.messages_per_step = net.messages_per_step();
      p.messages_per_agent_per_step = p.messages_per_step / static_cast<double>(n);
      points.push_back(std::move(p));
    }
  }
  if (!out_csv.empty()) {
    fs::create_directories(fs::path(out_csv).parent_path().empty()
                               ? fs::path(".")
                               : fs::path(out_csv).parent_path());
    CsvWriter csv(out_csv, {"algo", "n_agents", "steps", "total_messages", "messages_per_step",
                            "messages_per_agent_per_step"});
    for (const auto& p : points)
      csv.row_mixed({p.algo, std::to_string(p.n_agents), std::to_string(p.steps),
                     std::to_string(p.total_messages), CsvWriter::format(p.messages_per_step),
                     CsvWriter::format(p.messages_per_agent_per_step)});
  }
  return points;
}

}  // namespace v2g
