#include "v2g/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace v2g {

using nlohmann::json;

namespace {

json dense_to_json(const Dense& d) {
  return json{{"in", d.in}, {"out", d.out}, {"w", d.w}, {"b", d.b}};
}

Dense dense_from_json(const json& j) {
  Dense d;
  d.in = j.at("in").get<int>();
  d.out = j.at("out").get<int>();
  d.w = j.at("w").get<std::vector<double>>();
  d.b = j.at("b").get<std::vector<double>>();
  if (d.w.size() != static_cast<std::size_t>(d.in) * d.out ||
      d.b.size() != static_cast<std::size_t>(d.out))
    throw std::runtime_error("checkpoint: corrupt layer shape");
  return d;
}

json params_to_json(const ParamSet& p) {
  json j;
  j["hidden"] = static_cast<int>(p.hidden);
  j["output"] = static_cast<int>(p.output);
  for (const auto& l : p.layers) j["layers"].push_back(dense_to_json(l));
  return j;
}

ParamSet params_from_json(const json& j) {
  ParamSet p;
  p.hidden = static_cast<Act>(j.at("hidden").get<int>());
  p.output = static_cast<Act>(j.at("output").get<int>());
  for (const auto& l : j.at("layers")) p.layers.push_back(dense_from_json(l));
  return p;
}

json opt_to_json(const OptState& o) {
  json j;
  j["step"] = o.step;
  for (const auto& l : o.m) j["m"].push_back(dense_to_json(l));
  for (const auto& l : o.v) j["v"].push_back(dense_to_json(l));
  return j;
}

OptState opt_from_json(const json& j) {
  OptState o;
  o.step = j.at("step").get<std::int64_t>();
  for (const auto& l : j.at("m")) o.m.push_back(dense_from_json(l));
  for (const auto& l : j.at("v")) o.v.push_back(dense_from_json(l));
  return o;
}

}  // namespace

void save_checkpoint(const std::string& path, const Trainer& trainer,
                     const std::vector<std::string>& rng_states) {
  json j;
  j["n_agents"] = trainer.n_agents();
  j["rng_states"] = rng_states;
  for (int i = 0; i < trainer.n_agents(); ++i) {
    const AgentNets& an = trainer.nets(i);
    json a;
    a["actor"] = params_to_json(an.actor);
    a["critic"] = params_to_json(an.critic);
    a["target_actor"] = params_to_json(an.target_actor);
    a["target_critic"] = params_to_json(an.target_critic);
    a["actor_opt"] = opt_to_json(an.actor_opt);
    a["critic_opt"] = opt_to_json(an.critic_opt);
    j["agents"].push_back(std::move(a));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << j.dump();
}

CheckpointData load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  json j = json::parse(in);
  CheckpointData data;
  data.rng_states = j.at("rng_states").get<std::vector<std::string>>();
  for (const auto& a : j.at("agents")) {
    AgentNets an;
    an.actor = params_from_json(a.at("actor"));
    an.critic = params_from_json(a.at("critic"));
    an.target_actor = params_from_json(a.at("target_actor"));
    an.target_critic = params_from_json(a.at("target_critic"));
    an.actor_opt = opt_from_json(a.at("actor_opt"));
    an.critic_opt = opt_from_json(a.at("critic_opt"));
    data.nets.push_back(std::move(an));
  }
  return data;
}

void restore_trainer(Trainer& trainer, const CheckpointData& data) {
  if (static_cast<int>(data.nets.size()) != trainer.n_agents())
    throw std::runtime_error("checkpoint: agent count mismatch");
  for (int i = 0; i < trainer.n_agents(); ++i) {
    const AgentNets& src = data.nets[i];
    AgentNets& dst = trainer.nets(i);
    if (src.actor.param_count() != dst.actor.param_count() ||
        src.critic.param_count() != dst.critic.param_count())
      throw std::runtime_error("checkpoint: network shape mismatch");
    dst = src;
  }
}

}  // namespace v2g
