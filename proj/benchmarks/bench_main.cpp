#include <benchmark/benchmark.h>

#include "v2g/config.hpp"
#include "v2g/experiment.hpp"
#include "v2g/net.hpp"
#include "v2g/replay.hpp"
#include "v2g/reward.hpp"

namespace {

using namespace v2g;

void BM_ForwardBackward(benchmark::State& state) {
  Rng rng(7);
  const int in = static_cast<int>(state.range(0));
  const std::vector<int> sizes{in, 64, 64, 1};
  auto net = make_mlp(sizes, Act::Tanh, Act::Identity, rng);
  auto grads = make_congruent_zeros(net);
  std::vector<double> x(in);
  for (auto& v : x) v = rng.uniform(-1.0, 1.0);
  FwdCache cache;
  const double dy = 1.0;
  for (auto _ : state) {
    auto y = forward(net, x, cache);
    benchmark::DoNotOptimize(y);
    auto dx = backward(net, cache, std::span<const double>(&dy, 1), grads);
    benchmark::DoNotOptimize(dx);
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(16)->Arg(160);

void BM_EnvStep(benchmark::State& state) {
  auto cfg = ExperimentConfig::defaults();
  Rng rng(3);
  GridEnv env(cfg.grid, cfg.fleet, 10, rng);
  std::vector<double> actions(10, 1.5);
  for (auto _ : state) {
    if (env.episode_done()) env.reset(rng);
    auto rec = env.step(actions, rng);
    benchmark::DoNotOptimize(rec);
  }
}
BENCHMARK(BM_EnvStep);

void BM_Rollout(benchmark::State& state) {
  auto cfg = ExperimentConfig::defaults();
  Rng rng(3);
  GridEnv env(cfg.grid, cfg.fleet, 10, rng);
  SimModel model(cfg.model, cfg.grid, env.profiles(), cfg.reward);
  auto snap = GridSnapshot::from_observations(env.observe_all());
  std::vector<double> actions(10, 1.5);
  const auto policy = [](int, const Observation&) { return 1.0; };
  for (auto _ : state) {
    auto r = model.rollout(snap, actions, 4, 0.95, policy, rng);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_Rollout);

void BM_TrainStep(benchmark::State& state) {
  auto cfg = ExperimentConfig::defaults();
  cfg.algorithm = static_cast<Algo>(state.range(0));
  cfg.learner.algorithm = cfg.algorithm;
  cfg.learner.validate();
  Rng env_rng(3), init_rng(4), train_rng(5), noise_rng(6);
  GridEnv env(cfg.grid, cfg.fleet, 10, env_rng);
  FeatureSpec spec{cfg.grid.load_norm_kw, cfg.grid.window_steps};
  std::vector<ActionBounds> bounds(10, ActionBounds{-7.0, 7.0});
  Trainer trainer(cfg.learner, spec, bounds, init_rng);
  SimModel model(cfg.model, cfg.grid, env.profiles(), cfg.reward);
  ReplayBuffer buffer(cfg.learner.buffer_capacity);
  while (buffer.size() < trainer.config().train_gate()) {
    if (env.episode_done()) env.reset(env_rng);
    auto obs = env.observe_all();
    std::vector<double> joint(10);
    for (int i = 0; i < 10; ++i) joint[i] = trainer.act(i, obs[i], 0.3, noise_rng);
    auto rec = env.step(joint, env_rng);
    Transition tr;
    tr.obs = obs;
    tr.actions = rec.action_kw;
    tr.rewards = step_rewards(rec, env.profiles(), cfg.reward);
    tr.next_obs = env.observe_all();
    tr.done.assign(10, 0);
    buffer.push(std::move(tr));
  }
  for (auto _ : state) {
    auto stats = trainer.train_step(buffer, &model, train_rng);
    benchmark::DoNotOptimize(stats);
  }
}
BENCHMARK(BM_TrainStep)->Arg(static_cast<int>(Algo::MADDPG))->Arg(static_cast<int>(Algo::DT_MADDPG));

}  // namespace

BENCHMARK_MAIN();
