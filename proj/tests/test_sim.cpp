#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mcroute/central.hpp"
#include "mcroute/errors.hpp"
#include "mcroute/sim.hpp"
#include "support.hpp"

using namespace mcroute;
using namespace testsupport;

namespace {

Instance sim_instance() {
  return make_inst({1.2, 0.9}, {{3.0, 3.0}, {2.5, 4.0}}, {3.0, 3.5});
}

double sample_sd(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(xs.size() - 1));
}

}  // namespace

TEST_CASE("ewma examples") {
  const std::vector<double> constant(12, 0.37);
  CHECK(ewma(constant, 0.2) == constant);

  const auto step = ewma({0.0, 1.0}, 0.5);
  CHECK(step[0] == 0.0);
  CHECK(step[1] == doctest::Approx(0.5).epsilon(1e-14));

  const std::vector<double> x = {0.4, 0.9, 0.1, 0.6};
  const auto nearly_raw = ewma(x, 1.0 - 1e-13);
  for (size_t k = 0; k < x.size(); ++k)
    CHECK(nearly_raw[k] == doctest::Approx(x[k]).epsilon(1e-10));

  CHECK_THROWS_AS(ewma({}, 0.5), ValidationError);
  CHECK_THROWS_AS(ewma({1.0}, 0.0), ValidationError);
  CHECK_THROWS_AS(ewma({1.0}, 1.0), ValidationError);
}

TEST_CASE("defaults resolve to the documented values") {
  const auto inst = sim_instance();
  SimConfig cfg;
  cfg.horizon = 1000.0;
  const auto full = resolve_sim_defaults(inst, cfg);
  CHECK(full.warmup == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(full.sample_interval == doctest::Approx(100.0 / 3.0).epsilon(1e-12));
  CHECK(full.horizon == 1000.0);
  CHECK(full.ewma_weight == cfg.ewma_weight);

  SimConfig explicit_cfg = cfg;
  explicit_cfg.warmup = 5.0;
  explicit_cfg.sample_interval = 2.0;
  const auto kept = resolve_sim_defaults(inst, explicit_cfg);
  CHECK(kept.warmup == 5.0);
  CHECK(kept.sample_interval == 2.0);
}

TEST_CASE("invalid sim configs are rejected") {
  const auto inst = sim_instance();
  const auto r = solve_central(inst, {}).routing;
  SimConfig cfg;
  cfg.horizon = 100.0;
  cfg.warmup = 100.0;
  CHECK_THROWS_AS(simulate(inst, r, cfg), ValidationError);
  cfg = {};
  cfg.ewma_weight = 1.0;
  CHECK_THROWS_AS(simulate(inst, r, cfg), ValidationError);
}

TEST_CASE("simulation matches the deterministic operating point") {
  const auto inst = sim_instance();
  const auto r = solve_central(inst, {}).routing;
  const auto loads = aggregate_loads(r);

  SimConfig cfg;
  cfg.horizon = 1.25e5;
  cfg.seed = 2026;
  const auto rep = simulate(inst, r, cfg);

  // Enough post-warmup traffic for the stated tolerances.
  for (int i = 0; i < inst.m; ++i) {
    double routed = 0.0;
    for (int j = 0; j < inst.n; ++j) routed += rep.split_counts(i, j);
    CHECK(routed >= 1e5);
  }

  for (int j = 0; j < inst.n; ++j) {
    const double rho = loads[j] / inst.node_cap(j);
    CHECK(std::abs(rep.node_util_timeavg[j] - rho) <= 0.05 * rho);
  }

  const auto expect = per_source_mean_delay(inst, r);
  for (int i = 0; i < inst.m; ++i)
    CHECK(std::abs(rep.persource_mean_delay[i] - expect[i]) <=
          0.10 * expect[i]);

  for (int i = 0; i < inst.m; ++i) {
    double sum = 0.0;
    for (int j = 0; j < inst.n; ++j) {
      const double frac = r(i, j) / inst.lambda[i];
      CHECK(std::abs(rep.empirical_split(i, j) - frac) <= 0.02);
      sum += rep.empirical_split(i, j);
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }

  for (int j = 0; j < inst.n; ++j) {
    CHECK(rep.node_util_timeavg[j] >= 0.0);
    CHECK(rep.node_util_timeavg[j] <= 1.0);
    for (double u : rep.node_util_series[j]) {
      CHECK(u >= 0.0);
      CHECK(u <= 1.0);
    }
    CHECK(rep.node_util_series[j].size() == rep.sample_times.size());
    CHECK(rep.node_queue_series[j].size() == rep.sample_times.size());
  }
}

TEST_CASE("messages are conserved per queue") {
  const auto inst = sim_instance();
  const auto r = solve_central(inst, {}).routing;
  SimConfig cfg;
  cfg.horizon = 5e3;
  cfg.seed = 7;
  const auto rep = simulate(inst, r, cfg);

  for (int i = 0; i < inst.m; ++i)
    for (int j = 0; j < inst.n; ++j)
      CHECK(rep.path_arrivals(i, j) ==
            rep.path_departures(i, j) + rep.path_in_system(i, j));
  for (int j = 0; j < inst.n; ++j)
    CHECK(rep.node_arrivals[j] ==
          rep.node_departures[j] + rep.node_in_system[j]);

  // Everything a source emitted entered some path queue.
  for (int i = 0; i < inst.m; ++i) {
    double entered = 0.0;
    for (int j = 0; j < inst.n; ++j) entered += rep.path_arrivals(i, j);
    CHECK(entered == rep.source_messages[i]);
  }
}

TEST_CASE("same seed reproduces the report bit for bit") {
  const auto inst = sim_instance();
  const auto r = solve_central(inst, {}).routing;
  SimConfig cfg;
  cfg.horizon = 4e3;
  cfg.seed = 99;
  const auto a = simulate(inst, r, cfg);
  const auto b = simulate(inst, r, cfg);
  CHECK(a.node_util_timeavg == b.node_util_timeavg);
  CHECK(a.persource_mean_delay == b.persource_mean_delay);
  CHECK(a.empirical_split.data == b.empirical_split.data);
  CHECK(a.sample_times == b.sample_times);
  CHECK(a.node_util_series == b.node_util_series);
  CHECK(a.node_queue_series == b.node_queue_series);
  CHECK(a.source_messages == b.source_messages);
}

TEST_CASE("different seeds agree within combined standard errors") {
  const auto inst = sim_instance();
  const auto r = solve_central(inst, {}).routing;
  SimConfig cfg;
  cfg.horizon = 2e4;
  const std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8};
  const auto reps = simulate_replications(inst, r, cfg, seeds);
  REQUIRE(reps.size() == seeds.size());

  for (int j = 0; j < inst.n; ++j) {
    std::vector<double> rest;
    for (size_t k = 2; k < reps.size(); ++k)
      rest.push_back(reps[k].node_util_timeavg[j]);
    const double se = sample_sd(rest);
    const double diff =
        std::abs(reps[0].node_util_timeavg[j] - reps[1].node_util_timeavg[j]);
    CHECK(diff <= 3.0 * se * std::sqrt(2.0));
  }
}

TEST_CASE("replications come back in seed order, matching single runs") {
  const auto inst = sim_instance();
  const auto r = solve_central(inst, {}).routing;
  SimConfig cfg;
  cfg.horizon = 3e3;
  const std::vector<std::uint64_t> seeds = {5, 9};
  const auto reps = simulate_replications(inst, r, cfg, seeds, Exec::parallel);
  const auto serial = simulate_replications(inst, r, cfg, seeds, Exec::serial);

  SimConfig one = cfg;
  one.seed = 5;
  const auto direct = simulate(inst, r, one);
  CHECK(reps[0].node_util_timeavg == direct.node_util_timeavg);
  CHECK(reps[0].empirical_split.data == direct.empirical_split.data);

  REQUIRE(serial.size() == reps.size());
  for (size_t k = 0; k < reps.size(); ++k) {
    CHECK(serial[k].node_util_timeavg == reps[k].node_util_timeavg);
    CHECK(serial[k].persource_mean_delay == reps[k].persource_mean_delay);
  }
}

TEST_CASE("unstable routings are rejected") {
  const auto inst = make_inst({1.2, 0.9}, {{3.0, 3.0}, {2.5, 4.0}},
                              {1.8, 4.0});
  // Everything to node 1: load 2.1 exceeds its capacity 1.8.
  const auto hot = make_routing({{1.2, 0.0}, {0.9, 0.0}});
  SimConfig cfg;
  cfg.horizon = 100.0;
  CHECK_THROWS_AS(simulate(inst, hot, cfg), UnstableRouting);
  CHECK_THROWS_AS(simulate_replications(inst, hot, cfg, {1, 2}),
                  UnstableRouting);

  // A bad row sum is just as unusable.
  const auto short_row = make_routing({{0.6, 0.0}, {0.45, 0.45}});
  CHECK_THROWS_AS(simulate(inst, short_row, cfg), UnstableRouting);
}
