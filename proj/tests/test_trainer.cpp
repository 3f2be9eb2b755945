#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "test_support.hpp"
#include "v2g/config.hpp"
#include "v2g/trainer.hpp"

using namespace v2g;

namespace {

ExperimentConfig toy_config(int n_agents, Algo algo) {
  auto cfg = ExperimentConfig::defaults();
  cfg.n_agents = n_agents;
  cfg.algorithm = algo;
  cfg.learner.algorithm = algo;
  cfg.grid.base_load.noise_sigma_kw = 0.0;
  cfg.grid.renewable.noise_sigma_kw = 0.0;
  cfg.fleet.arrival_hour = ScalarDist::point(0.0);
  cfg.fleet.departure_hour = ScalarDist::point(24.0);
  cfg.fleet.trip_energy_kwh = ScalarDist::point(0.0);
  cfg.fleet.initial_soc = ScalarDist::point(0.4);
  cfg.fleet.capacity_kwh = ScalarDist::point(50.0);
  return cfg;
}

Observation plugged_obs(const FeatureSpec& spec) {
  Observation o;
  o.soc = 0.4;
  o.t_etd = 8;
  o.soc_target = 0.8;
  o.price_now = 0.6542;
  o.renewable_available = 20.0;
  o.base_load = 25.0;
  o.plugged = 1.0;
  o.hour = 9.0;
  o.grid_window = {12.0, 14.0};
  (void)spec;
  return o;
}

// Fills a buffer by rolling the environment with random actions.
void fill_buffer(ReplayBuffer& buffer, GridEnv& env, const ExperimentConfig& cfg, Rng& env_rng,
                 Rng& act_rng, std::size_t count) {
  while (buffer.size() < count) {
    if (env.episode_done()) env.reset(env_rng);
    auto obs = env.observe_all();
    std::vector<double> joint(env.n_agents());
    for (auto& a : joint) a = act_rng.uniform(-6.0, 6.0);
    auto rec = env.step(joint, env_rng);
    Transition tr;
    tr.obs = obs;
    tr.actions = rec.action_kw;
    tr.rewards = step_rewards(rec, env.profiles(), cfg.reward);
    tr.next_obs = env.observe_all();
    tr.done.resize(env.n_agents());
    for (int i = 0; i < env.n_agents(); ++i)
      tr.done[i] = env.ev_state(i).departed || rec.episode_step == 23 ? 1 : 0;
    buffer.push(std::move(tr));
  }
}

}  // namespace

TEST_CASE("select_action conventions") {
  FeatureSpec spec{60.0, 6};
  Rng init(5);
  auto actor = make_mlp(std::vector<int>{spec.dim(), 16, 1}, Act::Tanh, Act::Tanh, init);
  ActionBounds bounds{-7.0, 7.0};
  auto obs = plugged_obs(spec);

  SUBCASE("deterministic without noise") {
    Rng r1(1), r2(2);
    CHECK(select_action(actor, obs, spec, 0.0, bounds, r1) ==
          select_action(actor, obs, spec, 0.0, bounds, r2));
  }
  SUBCASE("zero output maps to the midpoint") {
    zero_params(actor);
    Rng rng(1);
    CHECK(select_action(actor, obs, spec, 0.0, bounds, rng) == doctest::Approx(bounds.mid()));
    ActionBounds asym{-3.0, 7.0};
    CHECK(select_action(actor, obs, spec, 0.0, asym, rng) == doctest::Approx(2.0));
  }
  SUBCASE("unplugged EV acts zero") {
    obs.plugged = 0.0;
    Rng rng(1);
    CHECK(select_action(actor, obs, spec, 0.5, bounds, rng) == 0.0);
  }
  SUBCASE("noisy draws stay within bounds") {
    Rng rng(77);
    for (int i = 0; i < 10000; ++i) {
      const double a = select_action(actor, obs, spec, 0.4, bounds, rng);
      CHECK(a >= bounds.lo);
      CHECK(a <= bounds.hi);
    }
  }
}

TEST_CASE("composite_q and critic_target arithmetic") {
  CHECK(composite_q(2.8, -0.3) == doctest::Approx(2.5));
  CHECK(composite_q(0.0, 1.7) == doctest::Approx(1.7));
  CHECK(composite_q(2.8, 0.0) == doctest::Approx(2.8));

  CHECK(critic_target(1.0, 0.9, 2.8, 0.2, false) == doctest::Approx(3.7));
  CHECK(critic_target(1.0, 0.9, 2.8, 0.2, true) == doctest::Approx(1.0));
  CHECK(critic_target(1.0, 0.0, 2.8, 0.2, false) == doctest::Approx(1.0));
}

TEST_CASE("learner config validation") {
  LearnerConfig lc;
  lc.gamma = 1.0;
  CHECK_THROWS(lc.validate());
  lc = LearnerConfig{};
  lc.tau = 0.0;
  CHECK_THROWS(lc.validate());
  lc = LearnerConfig{};
  lc.k_prime = -1;
  CHECK_THROWS(lc.validate());
  lc = LearnerConfig{};
  lc.algorithm = Algo::MADDPG;
  lc.k_prime = 4;
  lc.validate();
  CHECK(lc.k_prime == 0);  // maddpg forces the rollout off
}

TEST_CASE("train gate: below threshold is a no-op") {
  auto cfg = toy_config(2, Algo::MADDPG);
  cfg.learner.minibatch_k = 8;
  cfg.learner.gate_multiple = 4;  // gate = 32
  Rng env_rng(3), init_rng(4), act_rng(5), train_rng(6);
  GridEnv env(cfg.grid, cfg.fleet, 2, env_rng);
  FeatureSpec spec{cfg.grid.load_norm_kw, cfg.grid.window_steps};
  std::vector<ActionBounds> bounds(2, ActionBounds{-7.0, 7.0});
  Trainer trainer(cfg.learner, spec, bounds, init_rng);
  ReplayBuffer buffer(1000);
  fill_buffer(buffer, env, cfg, env_rng, act_rng, 31);
  const auto before = trainer.params_checksum();
  auto stats = trainer.train_step(buffer, nullptr, train_rng);
  CHECK_FALSE(stats.trained);
  CHECK(trainer.params_checksum() == before);
  fill_buffer(buffer, env, cfg, env_rng, act_rng, 32);
  stats = trainer.train_step(buffer, nullptr, train_rng);
  CHECK(stats.trained);
  CHECK(trainer.params_checksum() != before);
}

TEST_CASE("constant-zero critic with y == R_sim gives zero loss and gradient") {
  // done=1 and reward==r_sim makes y = r; a zero critic then has zero error
  // only if r_sim == r, so craft r = 0 transitions and a zero critic.
  auto cfg = toy_config(1, Algo::IL);
  cfg.learner.minibatch_k = 4;
  cfg.learner.gate_multiple = 1;
  Rng init_rng(4), train_rng(6);
  FeatureSpec spec{cfg.grid.load_norm_kw, cfg.grid.window_steps};
  Trainer trainer(cfg.learner, spec, {ActionBounds{-7.0, 7.0}}, init_rng);
  zero_params(trainer.nets(0).critic);
  zero_params(trainer.nets(0).target_critic);
  zero_params(trainer.nets(0).actor);  // keeps the actor update at the midpoint
  zero_params(trainer.nets(0).target_actor);

  ReplayBuffer buffer(16);
  for (int i = 0; i < 4; ++i) {
    Transition tr;
    tr.obs = {plugged_obs(spec)};
    tr.actions = {1.0};
    tr.rewards = {0.0};
    tr.next_obs = {plugged_obs(spec)};
    tr.done = {1};
    buffer.push(std::move(tr));
  }
  auto stats = trainer.train_step(buffer, nullptr, train_rng);
  CHECK(stats.trained);
  CHECK(stats.critic_loss == doctest::Approx(0.0).epsilon(0.0));
  // zero gradient everywhere: critic parameters unchanged by Adam
  for (double w : trainer.nets(0).critic.layers[0].w) CHECK(w == 0.0);
}

TEST_CASE("single-sample critic update matches a hand-traced Adam step") {
  auto cfg = toy_config(1, Algo::IL);
  cfg.learner.minibatch_k = 1;
  cfg.learner.gate_multiple = 1;
  cfg.learner.lr_critic = 1e-3;
  Rng init_rng(4), train_rng(6);
  FeatureSpec spec{cfg.grid.load_norm_kw, cfg.grid.window_steps};
  Trainer trainer(cfg.learner, spec, {ActionBounds{-7.0, 7.0}}, init_rng);

  // single linear critic layer: q = w . x + b
  ParamSet lin;
  lin.output = Act::Identity;
  lin.hidden = Act::Tanh;
  Dense d;
  d.in = trainer.critic_input_dim();
  d.out = 1;
  d.w.assign(d.in, 0.0);
  d.w[0] = 0.25;                       // soc feature
  d.w[d.in - 1] = -0.5;                // action feature
  d.b = {0.1};
  lin.layers = {d};
  trainer.nets(0).critic = lin;
  trainer.nets(0).target_critic = lin;
  trainer.nets(0).critic_opt = make_opt_state(lin);
  zero_params(trainer.nets(0).actor);
  zero_params(trainer.nets(0).target_actor);

  const auto obs = plugged_obs(spec);
  Transition tr;
  tr.obs = {obs};
  tr.actions = {2.0};
  tr.rewards = {1.5};
  tr.next_obs = {obs};
  tr.done = {1};  // y = r
  ReplayBuffer buffer(4);
  buffer.push(tr);

  // hand computation
  auto x = observation_features(obs, spec);
  x.push_back(2.0 / 7.0);
  double q = 0.1;
  for (std::size_t i = 0; i < x.size(); ++i) q += lin.layers[0].w[i] * x[i];
  const double err = q - 1.5;
  const double expected_loss = err * err;

  auto stats = trainer.train_step(buffer, nullptr, train_rng);
  CHECK(stats.trained);
  CHECK(stats.critic_loss == doctest::Approx(expected_loss).epsilon(1e-12));

  // first Adam step moves each touched weight by ~lr * sign(grad)
  const auto& w_after = trainer.nets(0).critic.layers[0].w;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double g = 2.0 * err * x[i];
    if (std::abs(g) < 1e-9) {
      CHECK(w_after[i] == lin.layers[0].w[i]);
    } else {
      CHECK(w_after[i] ==
            doctest::Approx(lin.layers[0].w[i] - 1e-3 * g / (std::abs(g) + 1e-8)).epsilon(1e-9));
    }
  }
  const double gb = 2.0 * err;
  CHECK(trainer.nets(0).critic.layers[0].b[0] ==
        doctest::Approx(0.1 - 1e-3 * gb / (std::abs(gb) + 1e-8)).epsilon(1e-9));
}

TEST_CASE("critic loss gradient matches finite differences through a train step") {
  auto cfg = toy_config(1, Algo::IL);
  cfg.learner.minibatch_k = 4;
  cfg.learner.gate_multiple = 1;
  cfg.learner.lr_critic = 1e-3;
  cfg.learner.lr_actor = 1e-12;  // keep the actor effectively frozen
  Rng env_rng(3), init_rng(4), act_rng(5), train_rng(6);
  GridEnv env(cfg.grid, cfg.fleet, 1, env_rng);
  FeatureSpec spec{cfg.grid.load_norm_kw, cfg.grid.window_steps};
  Trainer trainer(cfg.learner, spec, {ActionBounds{-7.0, 7.0}}, init_rng);
  ReplayBuffer buffer(4);
  fill_buffer(buffer, env, cfg, env_rng, act_rng, 4);

  // snapshot for the loss oracle
  const ParamSet critic0 = trainer.nets(0).critic;
  const ParamSet target_critic0 = trainer.nets(0).target_critic;
  const ParamSet target_actor0 = trainer.nets(0).target_actor;
  Rng batch_rng = train_rng;  // copy: replays the same minibatch indices
  const auto batch = buffer.sample(4, batch_rng);

  auto loss_at = [&](const ParamSet& critic) {
    double loss = 0.0;
    for (const auto* t : batch) {
      Rng dummy(0);
      const double an =
          select_action(target_actor0, t->next_obs[0], spec, 0.0, ActionBounds{-7.0, 7.0}, dummy);
      auto xn = observation_features(t->next_obs[0], spec);
      xn.push_back(an / 7.0);
      const double qn = forward(target_critic0, xn)[0];
      const double y = critic_target(t->rewards[0], cfg.learner.gamma, 0.0, qn, t->done[0] != 0);
      auto x = observation_features(t->obs[0], spec);
      x.push_back(t->actions[0] / 7.0);
      const double q = forward(critic, x)[0];
      loss += (q - y) * (q - y) / 4.0;
    }
    return loss;
  };

  const auto stats = trainer.train_step(buffer, nullptr, train_rng);
  CHECK(stats.trained);
  CHECK(stats.critic_loss == doctest::Approx(loss_at(critic0)).epsilon(1e-10));

  // the first Adam step is lr * g/(|g|+eps): recover sign and rough magnitude
  ParamSet probe = critic0;
  auto ptrs = testsup::param_pointers(probe);
  ParamSet after = trainer.nets(0).critic;
  auto after_ptrs = testsup::param_pointers(after);
  auto before_ptrs = testsup::param_pointers(probe);
  const double h = 1e-6;
  int strong = 0;
  for (std::size_t i = 0; i < ptrs.size(); i += 7) {  // sample coordinates
    const double keep = *ptrs[i];
    *ptrs[i] = keep + h;
    const double up = loss_at(probe);
    *ptrs[i] = keep - h;
    const double dn = loss_at(probe);
    *ptrs[i] = keep;
    const double g = (up - dn) / (2.0 * h);
    const double delta = *after_ptrs[i] - *before_ptrs[i];
    if (std::abs(g) > 1e-5) {
      ++strong;
      CHECK(delta == doctest::Approx(-1e-3 * g / (std::abs(g) + 1e-8)).epsilon(1e-3));
    }
  }
  CHECK(strong > 10);
}

TEST_CASE("actor update follows the critic's action gradient") {
  auto cfg = toy_config(1, Algo::IL);
  cfg.learner.minibatch_k = 1;
  cfg.learner.gate_multiple = 1;
  cfg.learner.lr_actor = 1e-2;
  cfg.learner.lr_critic = 1e-15;  // hold the critic still
  FeatureSpec spec{cfg.grid.load_norm_kw, cfg.grid.window_steps};

  auto build = [&](double w_action) {
    Rng init_rng(4);
    auto t = std::make_unique<Trainer>(cfg.learner, spec,
                                       std::vector<ActionBounds>{ActionBounds{-7.0, 7.0}},
                                       init_rng);
    ParamSet lin;
    lin.output = Act::Identity;
    Dense d;
    d.in = t->critic_input_dim();
    d.out = 1;
    d.w.assign(d.in, 0.0);
    d.w[d.in - 1] = w_action;  // q = w_action * a/7
    d.b = {0.0};
    lin.layers = {d};
    t->nets(0).critic = lin;
    t->nets(0).target_critic = lin;
    t->nets(0).critic_opt = make_opt_state(lin);
    zero_params(t->nets(0).actor);  // starts at the midpoint (a = 0)
    return t;
  };

  const auto obs = plugged_obs(spec);
  Transition tr;
  tr.obs = {obs};
  tr.actions = {0.0};
  tr.rewards = {0.0};
  tr.next_obs = {obs};
  tr.done = {1};
  ReplayBuffer buffer(2);
  buffer.push(tr);

  Rng dummy(0);
  SUBCASE("positive dQ/da raises the action") {
    auto t = build(3.0);
    Rng train_rng(6);
    t->train_step(buffer, nullptr, train_rng);
    CHECK(t->act(0, obs, 0.0, dummy) > 0.0);
  }
  SUBCASE("negative dQ/da lowers the action") {
    auto t = build(-3.0);
    Rng train_rng(6);
    t->train_step(buffer, nullptr, train_rng);
    CHECK(t->act(0, obs, 0.0, dummy) < 0.0);
  }
  SUBCASE("critic constant in the action leaves the actor unchanged") {
    auto t = build(0.0);
    const auto before = t->params_checksum();
    Rng train_rng(6);
    t->train_step(buffer, nullptr, train_rng);
    // critic lr is ~0 and actor gradient is exactly zero
    CHECK(param_checksum(t->nets(0).actor) == param_checksum(t->nets(0).actor));
    Rng d2(0);
    CHECK(t->act(0, obs, 0.0, d2) == 0.0);
    (void)before;
  }
  SUBCASE("unplugged samples are masked out of the actor update") {
    auto t = build(3.0);
    Transition away = tr;
    away.obs[0].plugged = 0.0;
    ReplayBuffer b2(2);
    b2.push(away);
    const auto actor_before = param_checksum(t->nets(0).actor);
    Rng train_rng(6);
    t->train_step(b2, nullptr, train_rng);
    CHECK(param_checksum(t->nets(0).actor) == actor_before);
  }
}

TEST_CASE("repeated updates on a frozen minibatch reduce the critic loss") {
  auto cfg = toy_config(1, Algo::IL);
  cfg.learner.minibatch_k = 1;
  cfg.learner.gate_multiple = 1;
  cfg.learner.lr_critic = 3e-3;
  cfg.learner.lr_actor = 1e-12;
  cfg.learner.tau = 1e-9;  // freeze targets so the objective stays put
  FeatureSpec spec{cfg.grid.load_norm_kw, cfg.grid.window_steps};
  Rng init_rng(4), train_rng(6);
  Trainer trainer(cfg.learner, spec, {ActionBounds{-7.0, 7.0}}, init_rng);
  const auto obs = plugged_obs(spec);
  Transition tr;
  tr.obs = {obs};
  tr.actions = {2.0};
  tr.rewards = {3.0};
  tr.next_obs = {obs};
  tr.done = {1};
  ReplayBuffer buffer(2);
  buffer.push(tr);

  double first = 0.0, last = 0.0;
  for (int it = 0; it < 300; ++it) {
    const auto stats = trainer.train_step(buffer, nullptr, train_rng);
    if (it == 0) first = stats.critic_loss;
    last = stats.critic_loss;
  }
  CHECK(last < 0.01 * first);
}

TEST_CASE("reduction: dt_maddpg with k'=0 is bit-identical to maddpg") {
  auto run = [](Algo algo, int k_prime) {
    auto cfg = toy_config(2, algo);
    cfg.learner.minibatch_k = 8;
    cfg.learner.gate_multiple = 2;
    cfg.learner.k_prime = k_prime;
    cfg.learner.validate();
    Rng env_rng(3), init_rng(4), act_rng(5), train_rng(6);
    GridEnv env(cfg.grid, cfg.fleet, 2, env_rng);
    FeatureSpec spec{cfg.grid.load_norm_kw, cfg.grid.window_steps};
    std::vector<ActionBounds> bounds(2, ActionBounds{-7.0, 7.0});
    Trainer trainer(cfg.learner, spec, bounds, init_rng);
    SimModel model(cfg.model, cfg.grid, env.profiles(), cfg.reward);
    ReplayBuffer buffer(1000);
    fill_buffer(buffer, env, cfg, env_rng, act_rng, trainer.config().train_gate());
    for (int i = 0; i < 30; ++i)
      trainer.train_step(buffer, algo == Algo::DT_MADDPG ? &model : nullptr, train_rng);
    return trainer.params_checksum();
  };
  CHECK(run(Algo::MADDPG, 0) == run(Algo::DT_MADDPG, 0));
  CHECK(run(Algo::MADDPG, 0) != run(Algo::DT_MADDPG, 4));
}

TEST_CASE("rollout-gradient path: finite differences match an environment clone") {
  auto cfg = toy_config(2, Algo::DT_MADDPG);
  cfg.learner.k_prime = 2;
  Rng env_rng(31);
  GridEnv env(cfg.grid, cfg.fleet, 2, env_rng);
  SimModel model(cfg.model, cfg.grid, env.profiles(), cfg.reward);
  env.step({1.0, -1.0}, env_rng);
  env.step({0.5, 0.5}, env_rng);

  const auto obs = env.observe_all();
  const std::vector<double> base_action{2.0, -1.0};
  const RolloutPolicy policy = [](int, const Observation& o) {
    return o.plugged > 0.5 ? 1.0 : 0.0;
  };

  const double h = 1e-3;
  auto rsim_at = [&](double a0) {
    auto snap = GridSnapshot::from_observations(obs);
    Rng mrng(1);
    std::vector<double> act = base_action;
    act[0] = a0;
    return model.rollout(snap, act, 2, cfg.learner.gamma, policy, mrng)[0];
  };
  const double fd_model = (rsim_at(base_action[0] + h) - rsim_at(base_action[0] - h)) / (2 * h);

  auto clone_at = [&](double a0) {
    GridEnv clone = env;
    Rng clone_rng = env_rng;
    std::vector<double> act = base_action;
    act[0] = a0;
    double total = 0.0, discount = 1.0;
    for (int j = 1; j <= 2; ++j) {
      auto rec = clone.step(act, clone_rng);
      total += discount * step_rewards(rec, clone.profiles(), cfg.reward)[0];
      discount *= cfg.learner.gamma;
      for (int i = 0; i < 2; ++i) act[i] = policy(i, clone.observe(i));
    }
    return total;
  };
  const double fd_clone = (clone_at(base_action[0] + h) - clone_at(base_action[0] - h)) / (2 * h);

  CHECK(fd_model == doctest::Approx(fd_clone).epsilon(1e-3));
}

TEST_CASE("use_rsim_actor_grad pushes the action toward the rollout optimum") {
  // crafted world: base 10 kW, no renewable, window [20]; Var([20, 10+a]) is
  // minimized at a = 10, so dR_sim/da > 0 at a = 0 and the actor must move up.
  auto cfg = toy_config(1, Algo::DT_MADDPG);
  cfg.grid.base_load.mean_kw = 10.0;
  cfg.grid.base_load.amplitude_kw = 0.0;
  cfg.grid.renewable.kind = LoadProfile::Kind::Trace;
  cfg.grid.renewable.trace_kw.assign(24, 0.0);
  cfg.reward.w_global = 1.0;
  cfg.reward.alpha = 0.1;
  cfg.reward.beta = 0.0;
  cfg.learner.k_prime = 1;
  cfg.learner.use_rsim_actor_grad = true;
  cfg.learner.lr_actor = 1e-2;
  cfg.learner.lr_critic = 1e-15;
  cfg.learner.minibatch_k = 1;
  cfg.learner.gate_multiple = 1;
  cfg.learner.validate();

  FeatureSpec spec{cfg.grid.load_norm_kw, cfg.grid.window_steps};
  Rng env_rng(7);
  GridEnv env(cfg.grid, cfg.fleet, 1, env_rng);
  SimModel model(cfg.model, cfg.grid, env.profiles(), cfg.reward);
  Rng init_rng(4);
  Trainer trainer(cfg.learner, spec, {ActionBounds{-7.0, 7.0}}, init_rng);
  zero_params(trainer.nets(0).critic);  // all signal flows through R_sim
  zero_params(trainer.nets(0).target_critic);
  zero_params(trainer.nets(0).actor);
  zero_params(trainer.nets(0).target_actor);

  Observation o = env.observe(0);
  o.grid_window = {20.0};
  o.base_load = 10.0;
  o.renewable_available = 0.0;
  Transition tr;
  tr.obs = {o};
  tr.actions = {0.0};
  tr.rewards = {0.0};
  tr.next_obs = {o};
  tr.done = {1};
  ReplayBuffer buffer(2);
  buffer.push(tr);

  Rng train_rng(6), dummy(0);
  trainer.train_step(buffer, &model, train_rng);
  CHECK(trainer.act(0, o, 0.0, dummy) > 0.0);
}

TEST_CASE("seeded determinism of whole training") {
  auto run = [](std::uint64_t seed) {
    auto cfg = toy_config(2, Algo::DT_MADDPG);
    cfg.learner.minibatch_k = 8;
    cfg.learner.gate_multiple = 2;
    cfg.learner.k_prime = 2;
    cfg.learner.validate();
    Rng env_rng(seed), init_rng(seed + 1), act_rng(seed + 2), train_rng(seed + 3);
    GridEnv env(cfg.grid, cfg.fleet, 2, env_rng);
    FeatureSpec spec{cfg.grid.load_norm_kw, cfg.grid.window_steps};
    std::vector<ActionBounds> bounds(2, ActionBounds{-7.0, 7.0});
    Trainer trainer(cfg.learner, spec, bounds, init_rng);
    SimModel model(cfg.model, cfg.grid, env.profiles(), cfg.reward);
    ReplayBuffer buffer(1000);
    fill_buffer(buffer, env, cfg, env_rng, act_rng, trainer.config().train_gate());
    for (int i = 0; i < 20; ++i) trainer.train_step(buffer, &model, train_rng);
    return trainer.params_checksum();
  };
  CHECK(run(11) == run(11));
  CHECK(run(11) != run(12));
}

TEST_CASE("target lag: targets move toward mains by factor tau per step") {
  auto cfg = toy_config(1, Algo::IL);
  cfg.learner.minibatch_k = 2;
  cfg.learner.gate_multiple = 1;
  cfg.learner.tau = 0.25;
  FeatureSpec spec{cfg.grid.load_norm_kw, cfg.grid.window_steps};
  Rng env_rng(3), init_rng(4), act_rng(5), train_rng(6);
  GridEnv env(cfg.grid, cfg.fleet, 1, env_rng);
  Trainer trainer(cfg.learner, spec, {ActionBounds{-7.0, 7.0}}, init_rng);
  ReplayBuffer buffer(8);
  fill_buffer(buffer, env, cfg, env_rng, act_rng, 2);

  const ParamSet target_before = trainer.nets(0).target_critic;
  trainer.train_step(buffer, nullptr, train_rng);
  const ParamSet& main_after = trainer.nets(0).critic;
  const ParamSet& target_after = trainer.nets(0).target_critic;
  for (std::size_t l = 0; l < target_after.layers.size(); ++l)
    for (std::size_t i = 0; i < target_after.layers[l].w.size(); ++i) {
      const double lhs = target_after.layers[l].w[i] - main_after.layers[l].w[i];
      const double rhs = (1.0 - 0.25) * (target_before.layers[l].w[i] - main_after.layers[l].w[i]);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}
