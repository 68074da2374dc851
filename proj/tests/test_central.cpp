#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "mcroute/central.hpp"
#include "mcroute/errors.hpp"
#include "mcroute/oracle.hpp"
#include "mcroute/rng.hpp"
#include "support.hpp"

using namespace mcroute;
using namespace testsupport;

TEST_CASE("row projection handles the pinned examples") {
  {
    const auto x = project_row_simplex({0.6, 0.6}, 1.0, {1.0, 1.0});
    CHECK(x[0] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(x[1] == doctest::Approx(0.5).epsilon(1e-10));
  }
  {
    const auto x = project_row_simplex({2.0, 0.0}, 1.0, {0.7, 1.0});
    const auto ref = qp_project_oracle({2.0, 0.0}, 1.0, {0.7, 1.0});
    CHECK(x[0] == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(x[1] == doctest::Approx(0.3).epsilon(1e-10));
    CHECK(x[0] == doctest::Approx(ref[0]).epsilon(1e-8));
    CHECK(x[1] == doctest::Approx(ref[1]).epsilon(1e-8));
  }
  {
    const auto x = project_row_simplex({0.3, 0.3, 0.3}, 1.0, {1.0, 1.0, 1.0});
    for (double xi : x) CHECK(xi == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  }
}

TEST_CASE("row projection matches the exhaustive active-set oracle") {
  RandomStream rng(7);
  for (int caseno = 0; caseno < 200; ++caseno) {
    const int n = 2 + caseno % 3;
    std::vector<double> v(n), upper(n);
    double cap = 0.0;
    for (int j = 0; j < n; ++j) {
      v[j] = -1.0 + 3.0 * rng.uniform01();
      upper[j] = 0.05 + 1.45 * rng.uniform01();
      cap += upper[j];
    }
    const double total = (0.1 + 0.85 * rng.uniform01()) * cap;
    const auto x = project_row_simplex(v, total, upper);
    const auto ref = qp_project_oracle(v, total, upper);
    REQUIRE(!ref.empty());

    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      CHECK(x[j] >= -1e-12);
      CHECK(x[j] <= upper[j] + 1e-12);
      CHECK(std::abs(x[j] - ref[j]) <= 1e-8);
      sum += x[j];
    }
    CHECK(std::abs(sum - total) <= 1e-12 * std::max(1.0, total));

    // Free coordinates all share one shift.
    double shift = std::numeric_limits<double>::quiet_NaN();
    for (int j = 0; j < n; ++j) {
      if (x[j] > 1e-9 && x[j] < upper[j] - 1e-9) {
        if (std::isnan(shift)) shift = v[j] - x[j];
        CHECK(v[j] - x[j] == doctest::Approx(shift).epsilon(1e-7).scale(1.0));
      }
    }
  }
}

TEST_CASE("row projection edge totals") {
  const std::vector<double> upper{0.4, 0.6, 0.25};
  const auto full = project_row_simplex({0.1, 0.2, 0.3}, 1.25, upper);
  for (int j = 0; j < 3; ++j) CHECK(full[j] == doctest::Approx(upper[j]));
  const auto none = project_row_simplex({-1.0, 2.0, 0.5}, 0.0, upper);
  for (int j = 0; j < 3; ++j) CHECK(none[j] == doctest::Approx(0.0).scale(1.0));
  CHECK_THROWS_AS(project_row_simplex({0.5, 0.5}, 2.0, {0.4, 0.4}),
                  InfeasibleError);
}

TEST_CASE("initial point is strictly feasible") {
  RandomStream rng(11);
  for (int k = 0; k < 20; ++k) {
    const auto inst = random_instance(rng, 5, 3);
    const auto r = initial_feasible(inst);
    CHECK(check_feasible(inst, r).pass);
  }
}

TEST_CASE("initial point is uniform on a symmetric instance") {
  const auto inst = make_inst({1.0, 1.0}, {{3.0, 3.0}, {3.0, 3.0}}, {3.0, 3.0});
  const auto r = initial_feasible(inst);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(r(i, j) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("initial point redistributes around a tight path") {
  // One path cannot carry its proportional share.
  const auto inst = make_inst({1.0}, {{0.3, 4.0, 4.0}}, {5.0, 5.0, 5.0}, 1e-6);
  const auto r = initial_feasible(inst);
  CHECK(check_feasible(inst, r).pass);
  CHECK(r(0, 0) <= inst.path_bound(0, 0) + 1e-12);
  CHECK(r(0, 0) + r(0, 1) + r(0, 2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("jointly infeasible instances are rejected with a certificate") {
  // Necessary per-row and total conditions hold, but both sources are pinned
  // to node 1 beyond its capacity: flow into it must exceed 1.5.
  const auto inst = make_inst({1.0, 1.0}, {{2.0, 0.2}, {2.0, 0.2}}, {1.5, 2.0},
                              1e-6);
  CHECK_THROWS_AS(initial_feasible(inst), InfeasibleError);
}

TEST_CASE("solver finds the symmetric optima") {
  {
    const auto inst = make_inst({1.0}, {{2.0, 2.0}}, {2.0, 2.0});
    const auto res = solve_central(inst, {});
    CHECK(res.converged);
    CHECK(res.routing(0, 0) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(res.routing(0, 1) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(res.objective == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
  }
  {
    const auto inst =
        make_inst({1.0, 1.0}, {{3.0, 3.0}, {3.0, 3.0}}, {3.0, 3.0});
    const auto res = solve_central(inst, {});
    CHECK(res.converged);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(res.routing(i, j) == doctest::Approx(0.5).epsilon(1e-8));
  }
}

TEST_CASE("solver matches the grid oracle on the asymmetric pair") {
  const auto inst = make_inst({1.0}, {{3.0, 3.0}}, {2.0, 4.0});
  const auto res = solve_central(inst, {});
  CHECK(res.converged);

  OracleConfig ocfg;
  ocfg.grid_points = 1000;
  ocfg.refine_rounds = 4;
  const auto oracle = brute_force_optimum(inst, ocfg);

  CHECK(std::abs(res.objective - oracle.objective) <= 1e-5);
  CHECK(res.routing(0, 1) > res.routing(0, 0));  // favors the faster server
  CHECK(wardrop_report(inst, res.routing, 1e-8, 1e-4).pass);
}

TEST_CASE("wardrop report classifies optima and non-optima") {
  const auto inst = make_inst({1.0}, {{2.0, 2.0}}, {2.0, 2.0});

  const auto at_opt = wardrop_report(inst, make_routing({{0.5, 0.5}}), 1e-8,
                                     1e-10);
  CHECK(at_opt.pass);
  CHECK(at_opt.spread[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(at_opt.used[0][0]);
  CHECK(at_opt.used[0][1]);

  const auto off_opt = wardrop_report(inst, make_routing({{0.6, 0.4}}), 1e-8,
                                      1e-4);
  CHECK_FALSE(off_opt.pass);
  CHECK(off_opt.spread[0] > 1e-4);
}

TEST_CASE("wardrop certificate separates optimal from suboptimal points") {
  RandomStream rng(23);
  for (int k = 0; k < 5; ++k) {
    const auto inst = random_instance(rng, 2, 2);
    OracleConfig ocfg;
    ocfg.grid_points = 301;
    ocfg.refine_rounds = 4;
    const auto oracle = brute_force_optimum(inst, ocfg);

    // Grid accuracy bound, scaled by the local marginal-cost slopes.
    const auto loads = aggregate_loads(oracle.routing);
    double acc = 0.0;
    for (int i = 0; i < inst.m; ++i) {
      const double range = std::min(inst.lambda[i], inst.path_bound(i, 0));
      const double step = range * std::pow(ocfg.shrink, ocfg.refine_rounds) /
                          (ocfg.grid_points - 1);
      for (int j = 0; j < inst.n; ++j) {
        const double slope =
            inst.access_fn(i, j).marginal_cost_derivative(oracle.routing(i, j)) +
            inst.node_fn(j).marginal_cost_derivative(loads[j]);
        acc = std::max(acc, step * slope);
      }
    }
    const double tol = 10.0 * std::max(acc, 1e-9);
    CHECK(wardrop_report(inst, oracle.routing, 1e-8, tol).pass);

    // A clearly worse feasible point must fail the certificate. Pile each
    // source onto one node, then back off until the blend is feasible.
    RoutingMatrix vert(inst.m, inst.n);
    for (int i = 0; i < inst.m; ++i) {
      std::vector<double> v(inst.n, 0.0), upper(inst.n);
      v[i % inst.n] = 3.0 * inst.lambda[i];
      for (int j = 0; j < inst.n; ++j)
        upper[j] = inst.path_bound(i, j) * (1.0 - 1e-6);
      const auto row = project_row_simplex(v, inst.lambda[i], upper);
      for (int j = 0; j < inst.n; ++j) vert(i, j) = row[j];
    }
    bool found = false;
    RoutingMatrix off(inst.m, inst.n);
    for (double w : {1.0, 0.75, 0.5, 0.25, 0.125}) {
      for (size_t t = 0; t < off.data.size(); ++t)
        off.data[t] = (1.0 - w) * oracle.routing.data[t] + w * vert.data[t];
      if (!check_feasible(inst, off).pass) continue;
      if (objective(inst, off) >= oracle.objective + 1e-3) {
        found = true;
        break;
      }
    }
    REQUIRE(found);
    CHECK_FALSE(wardrop_report(inst, off, 1e-8, 1e-4).pass);
  }
}

TEST_CASE("accepted steps never increase the objective") {
  RandomStream rng(31);
  for (int k = 0; k < 5; ++k) {
    const auto inst = random_instance(rng, 5, 3);
    const auto res = solve_central(inst, {});
    CHECK(res.converged);
    REQUIRE(!res.trace.empty());
    for (size_t t = 1; t < res.trace.size(); ++t)
      CHECK(res.trace[t].objective <=
            res.trace[t - 1].objective + 1e-12 * res.trace[t - 1].objective);
    CHECK(check_feasible(inst, res.routing).pass);
    CHECK(res.report.pass);
    // Complementary slackness at the certified point.
    for (int i = 0; i < inst.m; ++i)
      for (int j = 0; j < inst.n; ++j)
        CHECK(res.report.beta(i, j) * res.routing(i, j) <= 1e-4);
  }
}

TEST_CASE("solver respects a binding path cap") {
  const auto inst =
      make_inst({1.0, 0.8}, {{3.0, 0.4}, {3.0, 3.0}}, {4.0, 4.0}, 1e-6);
  const auto res = solve_central(inst, {});
  CHECK(res.converged);
  CHECK(res.routing(0, 1) <= inst.path_bound(0, 1) + 1e-12);
  CHECK(check_feasible(inst, res.routing).pass);

  OracleConfig ocfg;
  ocfg.grid_points = 501;
  ocfg.refine_rounds = 4;
  const auto oracle = brute_force_optimum(inst, ocfg);
  CHECK(std::abs(res.objective - oracle.objective) <= 1e-5);
}

TEST_CASE("a fully bound-determined instance lands on the node bounds") {
  const double b0 = 1.5 - 1e-3, b1 = 2.0 - 1e-3;
  const auto inst = make_inst({b0 + b1}, {{5.0, 5.0}}, {1.5, 2.0}, 1e-3);
  const auto res = solve_central(inst, {});
  CHECK(res.converged);
  CHECK(res.routing(0, 0) == doctest::Approx(b0).epsilon(1e-9));
  CHECK(res.routing(0, 1) == doctest::Approx(b1).epsilon(1e-9));
  CHECK(res.report.node_bound_active[0]);
  CHECK(res.report.node_bound_active[1]);
  CHECK(std::isfinite(res.objective));
}

TEST_CASE("solver is deterministic") {
  RandomStream rng(47);
  const auto inst = random_instance(rng, 5, 3);
  const auto a = solve_central(inst, {});
  const auto b = solve_central(inst, {});
  CHECK(a.routing.data == b.routing.data);
  CHECK(a.objective == b.objective);
  REQUIRE(a.trace.size() == b.trace.size());
  for (size_t t = 0; t < a.trace.size(); ++t) {
    CHECK(a.trace[t].objective == b.trace[t].objective);
    CHECK(a.trace[t].step_norm == b.trace[t].step_norm);
  }
}

TEST_CASE("trace rows are well formed") {
  RandomStream rng(53);
  const auto inst = random_instance(rng, 3, 3);
  const auto res = solve_central(inst, {});
  REQUIRE(!res.trace.empty());
  int prev = -1;
  for (const auto& row : res.trace) {
    CHECK(row.iter > prev);
    prev = row.iter;
    CHECK(std::isfinite(row.objective));
    CHECK(row.loads.size() == static_cast<size_t>(inst.n));
    CHECK(row.mean_delay.size() == static_cast<size_t>(inst.m));
    CHECK(row.prices.empty());  // distributed-only column
  }
}
