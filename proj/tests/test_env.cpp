#include <doctest.h>

#include <cmath>
#include <fstream>

#include "test_support.hpp"
#include "v2g/config.hpp"
#include "v2g/grid_env.hpp"

using namespace v2g;

namespace {

// Noise-free grid with flat profiles, handy for hand-computed balances.
GridConfig flat_grid(double base_kw, double renew_kw) {
  GridConfig g;
  g.base_load.kind = LoadProfile::Kind::Sinusoid;
  g.base_load.mean_kw = base_kw;
  g.base_load.amplitude_kw = 0.0;
  g.base_load.noise_sigma_kw = 0.0;
  g.renewable.kind = LoadProfile::Kind::Trace;
  g.renewable.trace_kw.assign(24, renew_kw);
  g.renewable.noise_sigma_kw = 0.0;
  return g;
}

FleetConfig always_present_fleet() {
  FleetConfig f;
  f.arrival_hour = ScalarDist::point(0.0);
  f.departure_hour = ScalarDist::point(24.0);
  f.trip_energy_kwh = ScalarDist::point(0.0);
  f.initial_soc = ScalarDist::point(0.5);
  f.capacity_kwh = ScalarDist::point(50.0);
  f.eta_charge = 1.0;
  f.eta_discharge = 1.0;
  return f;
}

}  // namespace

TEST_CASE("soc_update hand cases") {
  EvProfile p;
  p.battery_capacity = 50.0;
  p.eta_charge = 1.0;
  p.eta_discharge = 1.0;
  EvState ev{0.5, true, 4, false};

  SUBCASE("plain charge") {
    auto r = soc_update(ev, p, 5.0, 1.0);
    CHECK(r.next.soc == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(r.realized_kw == doctest::Approx(5.0));
  }
  SUBCASE("zero flow identity") {
    auto r = soc_update(ev, p, 0.0, 1.0);
    CHECK(r.next.soc == 0.5);
    CHECK(r.realized_kw == 0.0);
    CHECK(r.battery_delta_kwh == 0.0);
  }
  SUBCASE("clamp at full reduces realized energy") {
    ev.soc = 0.99;
    auto r = soc_update(ev, p, 5.0, 1.0);
    CHECK(r.next.soc == doctest::Approx(1.0));
    CHECK(r.realized_kw * 1.0 == doctest::Approx(0.5));  // 0.5 kWh realized
  }
  SUBCASE("clamp at empty reduces realized discharge") {
    ev.soc = 0.02;
    auto r = soc_update(ev, p, -5.0, 1.0);
    CHECK(r.next.soc == doctest::Approx(0.0));
    CHECK(r.realized_kw == doctest::Approx(-1.0));  // only 1 kWh was available
  }
  SUBCASE("efficiency applies on both directions") {
    p.eta_charge = 0.9;
    p.eta_discharge = 0.8;
    auto rc = soc_update(ev, p, 10.0, 1.0);
    CHECK(rc.next.soc == doctest::Approx(0.5 + 9.0 / 50.0));
    CHECK(rc.realized_kw == doctest::Approx(10.0));
    auto rd = soc_update(ev, p, -4.0, 1.0);
    CHECK(rd.next.soc == doctest::Approx(0.5 - 5.0 / 50.0));
    CHECK(rd.realized_kw == doctest::Approx(-4.0));
  }
  SUBCASE("non-finite action rejected") {
    CHECK_THROWS(soc_update(ev, p, std::nan(""), 1.0));
    CHECK_THROWS(soc_update(ev, p, INFINITY, 1.0));
  }
}

TEST_CASE("step balance hand cases") {
  SUBCASE("no EVs") {
    Rng rng(1);
    GridEnv env(flat_grid(10.0, 4.0), always_present_fleet(), 0, rng);
    auto rec = env.step({}, rng);
    CHECK(rec.p_grid == doctest::Approx(6.0));
    CHECK(rec.renewable_used == doctest::Approx(4.0));
    CHECK(rec.curtailed == doctest::Approx(0.0));
  }
  SUBCASE("no demand at all") {
    Rng rng(1);
    GridEnv env(flat_grid(0.0, 5.0), always_present_fleet(), 0, rng);
    auto rec = env.step({}, rng);
    CHECK(rec.p_grid == 0.0);
    CHECK(rec.renewable_used == 0.0);
    CHECK(rec.curtailed == doctest::Approx(5.0));
  }
  SUBCASE("one EV discharging") {
    Rng rng(1);
    GridEnv env(flat_grid(10.0, 4.0), always_present_fleet(), 1, rng);
    auto rec = env.step({-3.0}, rng);
    CHECK(rec.p_grid == doctest::Approx(3.0));  // 10 - 3 - 4
    CHECK(rec.total_discharge == doctest::Approx(3.0));
  }
}

TEST_CASE("energy conservation and invariants under random actions") {
  auto cfg = ExperimentConfig::defaults();
  Rng rng(99);
  GridEnv env(cfg.grid, cfg.fleet, 6, rng);
  Rng act_rng(123);
  for (int ep = 0; ep < 4; ++ep) {
    env.reset(rng);
    while (!env.episode_done()) {
      std::vector<double> a(6);
      for (auto& v : a) v = act_rng.uniform(-9.0, 9.0);  // deliberately out of bounds at times
      auto rec = env.step(a, rng);
      const double net = rec.base_load + rec.total_charge - rec.total_discharge;
      CHECK(std::abs(rec.renewable_used + rec.p_grid - std::max(net, 0.0)) <= 1e-9);
      CHECK(rec.p_grid >= 0.0);
      CHECK(rec.renewable_used <= rec.renewable_available + 1e-12);
      CHECK(rec.curtailed >= -1e-12);
      for (int i = 0; i < 6; ++i) {
        CHECK(env.ev_state(i).soc >= 0.0);
        CHECK(env.ev_state(i).soc <= 1.0);
        if (env.ev_state(i).plugged) CHECK(env.ev_state(i).t_etd >= 1);
      }
    }
  }
  CHECK(env.clamp_warnings() > 0);  // out-of-bounds actions were clamped
}

TEST_CASE("observation conventions") {
  auto g = flat_grid(10.0, 4.0);
  FleetConfig f = always_present_fleet();
  f.arrival_hour = ScalarDist::point(9.0);
  f.departure_hour = ScalarDist::point(17.0);
  Rng rng(5);
  GridEnv env(g, f, 2, rng);

  SUBCASE("away convention: plugged=0, t_etd=0") {
    auto o = env.observe(0);
    CHECK(o.plugged == 0.0);
    CHECK(o.t_etd == 0.0);
  }
  SUBCASE("determinism: two observes are identical") {
    auto a = env.observe(1);
    auto b = env.observe(1);
    CHECK(a.soc == b.soc);
    CHECK(a.price_now == b.price_now);
    CHECK(a.grid_window == b.grid_window);
  }
  SUBCASE("price field comes from the tariff table") {
    // advance to hour 11 (peak)
    for (int t = 0; t < 11; ++t) env.step({0.0, 0.0}, rng);
    auto o = env.observe(0);
    CHECK(o.hour == 11.0);
    CHECK(o.price_now == doctest::Approx(1.1121));
    CHECK(o.plugged == 1.0);  // arrived at 9
    CHECK(o.t_etd == 6.0);    // departs at 17
  }
}

TEST_CASE("arrival deducts trip energy and departure fires once") {
  auto g = flat_grid(10.0, 0.0);
  FleetConfig f = always_present_fleet();
  f.arrival_hour = ScalarDist::point(3.0);
  f.departure_hour = ScalarDist::point(6.0);
  f.trip_energy_kwh = ScalarDist::point(10.0);
  f.initial_soc = ScalarDist::point(0.5);
  Rng rng(11);
  GridEnv env(g, f, 1, rng);

  CHECK(env.observe(0).plugged == 0.0);
  env.step({0.0}, rng);  // hour 0
  env.step({0.0}, rng);  // hour 1
  env.step({0.0}, rng);  // hour 2 -> arrival processed for hour 3
  auto o = env.observe(0);
  CHECK(o.plugged == 1.0);
  CHECK(o.soc == doctest::Approx(0.5 - 10.0 / 50.0));
  CHECK(o.t_etd == 3.0);

  int departures = 0;
  while (!env.episode_done()) {
    auto rec = env.step({0.0}, rng);
    departures += static_cast<int>(rec.departures.size());
  }
  CHECK(departures == 1);
  CHECK(env.ev_state(0).departed);
  CHECK_FALSE(env.ev_state(0).plugged);
}

TEST_CASE("seeded determinism: identical trajectories") {
  auto cfg = ExperimentConfig::defaults();
  auto run = [&cfg](std::uint64_t seed) {
    Rng rng(seed);
    GridEnv env(cfg.grid, cfg.fleet, 4, rng);
    Rng act(7);
    std::vector<double> trace;
    for (int ep = 0; ep < 2; ++ep) {
      env.reset(rng);
      while (!env.episode_done()) {
        std::vector<double> a(4);
        for (auto& v : a) v = act.uniform(-5.0, 5.0);
        auto rec = env.step(a, rng);
        trace.push_back(rec.p_grid);
        trace.push_back(rec.renewable_used);
        for (int i = 0; i < 4; ++i) trace.push_back(env.ev_state(i).soc);
      }
    }
    return trace;
  };
  const auto t1 = run(42);
  const auto t2 = run(42);
  const auto t3 = run(43);
  CHECK(t1 == t2);
  CHECK(t1 != t3);
}

TEST_CASE("profile and schedule sampling") {
  FleetConfig f;
  SUBCASE("fixed seed reproduces profiles") {
    Rng a(5), b(5);
    auto p1 = sample_ev_profile(a, f);
    auto p2 = sample_ev_profile(b, f);
    CHECK(p1.battery_capacity == p2.battery_capacity);
  }
  SUBCASE("point-mass distributions are exact") {
    f.capacity_kwh = ScalarDist::point(42.0);
    f.arrival_hour = ScalarDist::point(7.0);
    f.departure_hour = ScalarDist::point(19.0);
    Rng rng(1);
    auto p = sample_ev_profile(rng, f);
    CHECK(p.battery_capacity == 42.0);
    auto d = sample_day_schedule(rng, p, f.initial_soc);
    CHECK(d.arrival_hour == 7);
    CHECK(d.departure_hour == 19);
  }
  SUBCASE("empirical arrival mean within 3 sigma") {
    f.arrival_hour = ScalarDist::normal(9.0, 1.0, 0.0, 23.0);
    f.departure_hour = ScalarDist::point(24.0);
    Rng rng(77);
    auto p = sample_ev_profile(rng, f);
    const int n = 1000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += sample_day_schedule(rng, p, f.initial_soc).arrival_hour;
    const double mean = sum / n;
    // rounding to whole hours keeps the mean within ~3*sigma/sqrt(n) of 9
    CHECK(std::abs(mean - 9.0) < 3.0 * 1.0 / std::sqrt(static_cast<double>(n)) + 0.05);
  }
  SUBCASE("departure strictly after arrival even when dists collide") {
    f.arrival_hour = ScalarDist::point(10.0);
    f.departure_hour = ScalarDist::normal(10.0, 0.5, 1.0, 24.0);
    Rng rng(3);
    auto p = sample_ev_profile(rng, f);
    for (int i = 0; i < 200; ++i) {
      auto d = sample_day_schedule(rng, p, f.initial_soc);
      CHECK(d.departure_hour > d.arrival_hour);
    }
  }
  SUBCASE("rejects impossible departure config") {
    f.arrival_hour = ScalarDist::point(20.0);
    f.departure_hour = ScalarDist::normal(4.0, 1.0, 1.0, 12.0);
    // departure clamp hi (12) <= arrival lo (20): invalid
    f.departure_hour.hi = 12.0;
    CHECK_THROWS(f.validate());
  }
}

TEST_CASE("trace csv loader") {
  const auto dir = testsup::scratch_dir("trace");
  const auto path = dir + "/trace.csv";
  {
    std::ofstream out(path);
    out << "hour,kw\n";
    for (int h = 0; h < 24; ++h) out << h << "," << (h * 1.5) << "\n";
  }
  auto values = load_trace_csv(path);
  REQUIRE(values.size() == 24);
  CHECK(values[4] == doctest::Approx(6.0));

  LoadProfile p;
  p.kind = LoadProfile::Kind::Trace;
  p.trace_kw = values;
  CHECK(p.mean_at(4.0) == doctest::Approx(6.0));

  const auto bad = dir + "/bad.csv";
  {
    std::ofstream out(bad);
    out << "hour,kw\n0,5\n1,5\n";  // missing hours
  }
  CHECK_THROWS(load_trace_csv(bad));
}
