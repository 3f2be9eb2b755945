#include "v2g/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace v2g {

using nlohmann::json;

namespace {

ScalarDist dist_from_json(const json& j) {
  ScalarDist d;
  const std::string kind = j.value("dist", "point");
  if (kind == "point") {
    d = ScalarDist::point(j.at("value").get<double>());
  } else if (kind == "uniform") {
    d = ScalarDist::uniform(j.at("lo").get<double>(), j.at("hi").get<double>());
  } else if (kind == "normal") {
    d = ScalarDist::normal(j.at("mean").get<double>(), j.at("sigma").get<double>(),
                           j.value("lo", -1e300), j.value("hi", 1e300));
  } else {
    throw std::invalid_argument("config: unknown dist kind: " + kind);
  }
  return d;
}

json dist_to_json(const ScalarDist& d) {
  json j;
  switch (d.kind) {
    case ScalarDist::Kind::Point:
      j["dist"] = "point";
      j["value"] = d.a;
      break;
    case ScalarDist::Kind::Uniform:
      j["dist"] = "uniform";
      j["lo"] = d.a;
      j["hi"] = d.b;
      break;
    case ScalarDist::Kind::Normal:
      j["dist"] = "normal";
      j["mean"] = d.a;
      j["sigma"] = d.b;
      j["lo"] = d.lo;
      j["hi"] = d.hi;
      break;
  }
  return j;
}

LoadProfile profile_from_json(const json& j) {
  LoadProfile p;
  const std::string kind = j.value("kind", "sinusoid");
  if (kind == "sinusoid") {
    p.kind = LoadProfile::Kind::Sinusoid;
    p.mean_kw = j.value("mean_kw", p.mean_kw);
    p.amplitude_kw = j.value("amplitude_kw", p.amplitude_kw);
    p.peak_hour = j.value("peak_hour", p.peak_hour);
  } else if (kind == "solar") {
    p.kind = LoadProfile::Kind::Solar;
    p.peak_kw = j.value("peak_kw", p.peak_kw);
    p.sunrise_hour = j.value("sunrise_hour", p.sunrise_hour);
    p.sunset_hour = j.value("sunset_hour", p.sunset_hour);
  } else if (kind == "trace") {
    p.kind = LoadProfile::Kind::Trace;
    if (j.contains("csv"))
      p.trace_kw = load_trace_csv(j.at("csv").get<std::string>());
    else
      p.trace_kw = j.at("values").get<std::vector<double>>();
  } else {
    throw std::invalid_argument("config: unknown profile kind: " + kind);
  }
  p.noise_sigma_kw = j.value("noise_sigma_kw", p.noise_sigma_kw);
  return p;
}

json profile_to_json(const LoadProfile& p) {
  json j;
  switch (p.kind) {
    case LoadProfile::Kind::Sinusoid:
      j["kind"] = "sinusoid";
      j["mean_kw"] = p.mean_kw;
      j["amplitude_kw"] = p.amplitude_kw;
      j["peak_hour"] = p.peak_hour;
      break;
    case LoadProfile::Kind::Solar:
      j["kind"] = "solar";
      j["peak_kw"] = p.peak_kw;
      j["sunrise_hour"] = p.sunrise_hour;
      j["sunset_hour"] = p.sunset_hour;
      break;
    case LoadProfile::Kind::Trace:
      j["kind"] = "trace";
      j["values"] = p.trace_kw;
      break;
  }
  j["noise_sigma_kw"] = p.noise_sigma_kw;
  return j;
}

}  // namespace

void ExperimentConfig::validate() {
  if (n_agents < 0) throw std::invalid_argument("config: n_agents must be >= 0");
  if (episodes < 1 && eval_checkpoint.empty())
    throw std::invalid_argument("config: episodes must be >= 1");
  if (eval_episodes < 1) throw std::invalid_argument("config: eval_episodes must be >= 1");
  if (checkpoint_every < 0) throw std::invalid_argument("config: checkpoint_every must be >= 0");
  if (out_dir.empty()) throw std::invalid_argument("config: out_dir must be set");
  grid.validate();
  fleet.validate();
  reward.validate();
  learner.algorithm = algorithm;
  learner.validate();
  model.validate();
  comms.validate();
  if (comms.enabled && n_agents > 0 && comms.m0 >= n_agents + 1)
    throw std::invalid_argument("config: comms.m0 must be < n_agents + 1");
}

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig cfg;
  cfg.grid.base_load.kind = LoadProfile::Kind::Sinusoid;
  cfg.grid.base_load.mean_kw = 30.0;
  cfg.grid.base_load.amplitude_kw = 10.0;
  cfg.grid.base_load.peak_hour = 19.0;
  cfg.grid.base_load.noise_sigma_kw = 1.5;
  cfg.grid.renewable.kind = LoadProfile::Kind::Solar;
  cfg.grid.renewable.peak_kw = 60.0;
  cfg.grid.renewable.sunrise_hour = 6.0;
  cfg.grid.renewable.sunset_hour = 18.0;
  cfg.grid.renewable.noise_sigma_kw = 2.0;
  return cfg;
}

ExperimentConfig config_from_json_text(const std::string& text) {
  json j = json::parse(text);
  ExperimentConfig cfg = ExperimentConfig::defaults();
  cfg.algorithm = j.contains("algorithm") ? algo_from_name(j["algorithm"].get<std::string>())
                                          : cfg.algorithm;
  cfg.n_agents = j.value("n_agents", cfg.n_agents);
  cfg.episodes = j.value("episodes", cfg.episodes);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.eval_episodes = j.value("eval_episodes", cfg.eval_episodes);
  cfg.checkpoint_every = j.value("checkpoint_every", cfg.checkpoint_every);
  cfg.eval_checkpoint = j.value("eval_checkpoint", cfg.eval_checkpoint);

  if (j.contains("grid")) {
    const json& g = j["grid"];
    if (g.contains("base_load")) cfg.grid.base_load = profile_from_json(g["base_load"]);
    if (g.contains("renewable")) cfg.grid.renewable = profile_from_json(g["renewable"]);
    cfg.grid.window_steps = g.value("window_steps", cfg.grid.window_steps);
    cfg.grid.load_norm_kw = g.value("load_norm_kw", cfg.grid.load_norm_kw);
    if (g.contains("pricing")) {
      cfg.grid.pricing.periods.clear();
      for (const auto& p : g["pricing"].at("periods"))
        cfg.grid.pricing.periods.push_back({p.at("from").get<double>(), p.at("to").get<double>(),
                                            p.at("price").get<double>()});
    }
  }
  if (j.contains("fleet")) {
    const json& f = j["fleet"];
    if (f.contains("capacity_kwh")) cfg.fleet.capacity_kwh = dist_from_json(f["capacity_kwh"]);
    cfg.fleet.max_charge_kw = f.value("max_charge_kw", cfg.fleet.max_charge_kw);
    cfg.fleet.max_discharge_kw = f.value("max_discharge_kw", cfg.fleet.max_discharge_kw);
    cfg.fleet.eta_charge = f.value("eta_charge", cfg.fleet.eta_charge);
    cfg.fleet.eta_discharge = f.value("eta_discharge", cfg.fleet.eta_discharge);
    if (f.contains("arrival_hour")) cfg.fleet.arrival_hour = dist_from_json(f["arrival_hour"]);
    if (f.contains("departure_hour"))
      cfg.fleet.departure_hour = dist_from_json(f["departure_hour"]);
    if (f.contains("trip_energy_kwh"))
      cfg.fleet.trip_energy_kwh = dist_from_json(f["trip_energy_kwh"]);
    if (f.contains("initial_soc")) cfg.fleet.initial_soc = dist_from_json(f["initial_soc"]);
    cfg.fleet.soc_target = f.value("soc_target", cfg.fleet.soc_target);
    cfg.fleet.w_soc = f.value("w_soc", cfg.fleet.w_soc);
  }
  if (j.contains("reward")) {
    const json& r = j["reward"];
    cfg.reward.w_global = r.value("w_global", cfg.reward.w_global);
    cfg.reward.alpha = r.value("alpha", cfg.reward.alpha);
    cfg.reward.beta = r.value("beta", cfg.reward.beta);
    cfg.reward.c_success = r.value("c_success", cfg.reward.c_success);
    cfg.reward.c_fail = r.value("c_fail", cfg.reward.c_fail);
  }
  if (j.contains("learner")) {
    const json& l = j["learner"];
    cfg.learner.gamma = l.value("gamma", cfg.learner.gamma);
    cfg.learner.tau = l.value("tau", cfg.learner.tau);
    cfg.learner.lr_actor = l.value("lr_actor", cfg.learner.lr_actor);
    cfg.learner.lr_critic = l.value("lr_critic", cfg.learner.lr_critic);
    cfg.learner.minibatch_k = l.value("minibatch_k", cfg.learner.minibatch_k);
    cfg.learner.k_prime = l.value("k_prime", cfg.learner.k_prime);
    cfg.learner.fd_step_h = l.value("fd_step_h", cfg.learner.fd_step_h);
    cfg.learner.use_rsim_actor_grad =
        l.value("use_rsim_actor_grad", cfg.learner.use_rsim_actor_grad);
    cfg.learner.sim_features_in_critic =
        l.value("sim_features_in_critic", cfg.learner.sim_features_in_critic);
    if (l.contains("actor_hidden")) cfg.learner.actor_hidden = l["actor_hidden"].get<std::vector<int>>();
    if (l.contains("critic_hidden"))
      cfg.learner.critic_hidden = l["critic_hidden"].get<std::vector<int>>();
    cfg.learner.noise_sigma_start = l.value("noise_sigma_start", cfg.learner.noise_sigma_start);
    cfg.learner.noise_sigma_end = l.value("noise_sigma_end", cfg.learner.noise_sigma_end);
    cfg.learner.train_period = l.value("train_period", cfg.learner.train_period);
    cfg.learner.buffer_capacity = l.value("buffer_capacity", cfg.learner.buffer_capacity);
    cfg.learner.gate_multiple = l.value("gate_multiple", cfg.learner.gate_multiple);
  }
  if (j.contains("model")) {
    const json& m = j["model"];
    const std::string mode = m.value("mode", "oracle");
    if (mode == "oracle")
      cfg.model.mode = ModelMode::Oracle;
    else if (mode == "learned")
      cfg.model.mode = ModelMode::Learned;
    else
      throw std::invalid_argument("config: unknown model mode: " + mode);
    cfg.model.fidelity_noise = m.value("fidelity_noise", cfg.model.fidelity_noise);
  }
  if (j.contains("comms")) {
    const json& c = j["comms"];
    cfg.comms.enabled = c.value("enabled", cfg.comms.enabled);
    cfg.comms.m0 = c.value("m0", cfg.comms.m0);
    cfg.comms.m = c.value("m", cfg.comms.m);
    cfg.comms.sync_period = c.value("sync_period", cfg.comms.sync_period);
    const std::string central = c.value("central", "hub");
    if (central == "hub")
      cfg.comms.central_is_hub = true;
    else if (central == "random")
      cfg.comms.central_is_hub = false;
    else
      throw std::invalid_argument("config: comms.central must be hub or random");
  }
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    cfg.sweep.param = s.value("param", cfg.sweep.param);
    if (s.contains("values")) cfg.sweep.values = s["values"].get<std::vector<double>>();
    cfg.sweep.seeds_per_value = s.value("seeds_per_value", cfg.sweep.seeds_per_value);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
  json j;
  j["algorithm"] = algo_name(cfg.algorithm);
  j["n_agents"] = cfg.n_agents;
  j["episodes"] = cfg.episodes;
  j["seed"] = cfg.seed;
  j["out_dir"] = cfg.out_dir;
  j["eval_episodes"] = cfg.eval_episodes;
  j["checkpoint_every"] = cfg.checkpoint_every;

  j["grid"]["base_load"] = profile_to_json(cfg.grid.base_load);
  j["grid"]["renewable"] = profile_to_json(cfg.grid.renewable);
  j["grid"]["window_steps"] = cfg.grid.window_steps;
  j["grid"]["load_norm_kw"] = cfg.grid.load_norm_kw;
  for (const auto& p : cfg.grid.pricing.periods)
    j["grid"]["pricing"]["periods"].push_back({{"from", p.from_hour}, {"to", p.to_hour},
                                               {"price", p.price}});

  j["fleet"]["capacity_kwh"] = dist_to_json(cfg.fleet.capacity_kwh);
  j["fleet"]["max_charge_kw"] = cfg.fleet.max_charge_kw;
  j["fleet"]["max_discharge_kw"] = cfg.fleet.max_discharge_kw;
  j["fleet"]["eta_charge"] = cfg.fleet.eta_charge;
  j["fleet"]["eta_discharge"] = cfg.fleet.eta_discharge;
  j["fleet"]["arrival_hour"] = dist_to_json(cfg.fleet.arrival_hour);
  j["fleet"]["departure_hour"] = dist_to_json(cfg.fleet.departure_hour);
  j["fleet"]["trip_energy_kwh"] = dist_to_json(cfg.fleet.trip_energy_kwh);
  j["fleet"]["initial_soc"] = dist_to_json(cfg.fleet.initial_soc);
  j["fleet"]["soc_target"] = cfg.fleet.soc_target;
  j["fleet"]["w_soc"] = cfg.fleet.w_soc;

  j["reward"] = {{"w_global", cfg.reward.w_global}, {"alpha", cfg.reward.alpha},
                 {"beta", cfg.reward.beta}, {"c_success", cfg.reward.c_success},
                 {"c_fail", cfg.reward.c_fail}};

  j["learner"] = {{"gamma", cfg.learner.gamma},
                  {"tau", cfg.learner.tau},
                  {"lr_actor", cfg.learner.lr_actor},
                  {"lr_critic", cfg.learner.lr_critic},
                  {"minibatch_k", cfg.learner.minibatch_k},
                  {"k_prime", cfg.learner.k_prime},
                  {"fd_step_h", cfg.learner.fd_step_h},
                  {"use_rsim_actor_grad", cfg.learner.use_rsim_actor_grad},
                  {"sim_features_in_critic", cfg.learner.sim_features_in_critic},
                  {"actor_hidden", cfg.learner.actor_hidden},
                  {"critic_hidden", cfg.learner.critic_hidden},
                  {"noise_sigma_start", cfg.learner.noise_sigma_start},
                  {"noise_sigma_end", cfg.learner.noise_sigma_end},
                  {"train_period", cfg.learner.train_period},
                  {"buffer_capacity", cfg.learner.buffer_capacity},
                  {"gate_multiple", cfg.learner.gate_multiple}};

  j["model"] = {{"mode", cfg.model.mode == ModelMode::Oracle ? "oracle" : "learned"},
                {"fidelity_noise", cfg.model.fidelity_noise}};

  j["comms"] = {{"enabled", cfg.comms.enabled}, {"m0", cfg.comms.m0}, {"m", cfg.comms.m},
                {"sync_period", cfg.comms.sync_period},
                {"central", cfg.comms.central_is_hub ? "hub" : "random"}};

  j["sweep"] = {{"param", cfg.sweep.param}, {"values", cfg.sweep.values},
                {"seeds_per_value", cfg.sweep.seeds_per_value}};
  return j.dump(2);
}

ExperimentConfig apply_sweep_value(const ExperimentConfig& base, const std::string& param,
                                   double value) {
  ExperimentConfig cfg = base;
  if (param == "w_revenue") {
    // The sweep variable is the revenue preference; w_soc is its complement.
    if (value < 0.0 || value > 1.0)
      throw std::invalid_argument("sweep: w_revenue must be in [0,1]");
    cfg.fleet.w_soc = 1.0 - value;
  } else if (param == "w_soc") {
    cfg.fleet.w_soc = value;
  } else if (param == "w_global") {
    cfg.reward.w_global = value;
  } else if (param == "k_prime") {
    cfg.learner.k_prime = static_cast<int>(value);
  } else if (param == "fidelity_noise") {
    cfg.model.fidelity_noise = value;
  } else {
    throw std::invalid_argument("sweep: unknown parameter: " + param);
  }
  return cfg;
}

}  // namespace v2g
