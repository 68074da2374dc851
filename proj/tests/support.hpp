#ifndef MCROUTE_TESTS_SUPPORT_HPP
#define MCROUTE_TESTS_SUPPORT_HPP

// Shared test fixtures: deterministic random instances, finite-difference
// helpers, and tiny exhaustive oracles that the solver tests compare against.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mcroute/central.hpp"
#include "mcroute/model.hpp"
#include "mcroute/rng.hpp"

namespace testsupport {

using namespace mcroute;

// MM1 instance from plain nested vectors. eps < 0 means the documented
// default margin.
inline Instance make_inst(const std::vector<double>& lambda,
                          const std::vector<std::vector<double>>& mu_access,
                          const std::vector<double>& mu_node,
                          double eps = -1.0) {
  const int m = static_cast<int>(lambda.size());
  const int n = static_cast<int>(mu_node.size());
  Matrix mu(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) mu(i, j) = mu_access[i][j];
  if (eps < 0.0) eps = Instance::default_eps(mu.data, mu_node);
  return make_mm1_instance(lambda, mu, mu_node, eps);
}

inline RoutingMatrix make_routing(const std::vector<std::vector<double>>& v) {
  const int m = static_cast<int>(v.size());
  const int n = static_cast<int>(v[0].size());
  RoutingMatrix r(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = v[i][j];
  return r;
}

// Deterministic instance with moderate node utilization so optima stay
// interior: per-path capacities comfortably above each source's rate, node
// capacities sized for an aggregate utilization in [0.35, 0.6].
inline Instance random_instance(RandomStream& rng, int m, int n) {
  std::vector<double> lambda(m);
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    lambda[i] = 0.5 + rng.uniform01();
    total += lambda[i];
  }
  Matrix mu(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      mu(i, j) = lambda[i] * (0.8 + 1.2 * rng.uniform01());
  std::vector<double> mu_node(n);
  for (int j = 0; j < n; ++j) {
    const double util = 0.35 + 0.25 * rng.uniform01();
    mu_node[j] = total / n / util;
  }
  const double eps = Instance::default_eps(mu.data, mu_node);
  return make_mm1_instance(lambda, mu, mu_node, eps);
}

// Strictly interior random routing: a random row-feasible candidate blended
// toward the proportional start until the node bounds hold. Every entry ends
// up strictly positive and clear of the bounds.
inline RoutingMatrix random_interior_routing(RandomStream& rng,
                                             const Instance& inst) {
  const RoutingMatrix base = initial_feasible(inst);
  RoutingMatrix cand(inst.m, inst.n);
  for (int i = 0; i < inst.m; ++i) {
    std::vector<double> v(inst.n), upper(inst.n);
    for (int j = 0; j < inst.n; ++j) {
      v[j] = rng.uniform01() * inst.lambda[i];
      upper[j] = inst.path_bound(i, j) * (1.0 - 1e-6);
    }
    const std::vector<double> row =
        project_row_simplex(v, inst.lambda[i], upper);
    for (int j = 0; j < inst.n; ++j) cand(i, j) = row[j];
  }
  double w = 0.5;
  for (int attempt = 0; attempt < 60; ++attempt) {
    RoutingMatrix r(inst.m, inst.n);
    for (size_t k = 0; k < r.data.size(); ++k)
      r.data[k] = (1.0 - w) * base.data[k] + w * cand.data[k];
    if (check_feasible(inst, r).pass) return r;
    w *= 0.5;
  }
  return base;
}

// Central finite difference of the objective in one routing entry. The step
// adapts to the distance to zero and to both poles so every evaluation stays
// strictly feasible.
inline double fd_gradient_entry(const Instance& inst, const RoutingMatrix& r,
                                int i, int j) {
  const std::vector<double> loads = aggregate_loads(r);
  const double down = r(i, j);
  const double up = std::min(inst.path_bound(i, j) - r(i, j),
                             inst.node_bound(j) - loads[j]);
  double h = 6e-6 * std::max(0.05, std::abs(r(i, j)));
  h = std::min({h, 0.4 * down, 0.4 * up});
  RoutingMatrix plus = r, minus = r;
  plus(i, j) += h;
  minus(i, j) -= h;
  return (objective(inst, plus) - objective(inst, minus)) / (2.0 * h);
}

// Exhaustive active-set solver for min ||x - v||^2 s.t. 0 <= x <= upper,
// sum x = total. Enumerates every {at-zero, at-upper, free} pattern and
// returns the first one whose KKT conditions hold. Usable up to n = 4.
inline std::vector<double> qp_project_oracle(const std::vector<double>& v,
                                             double total,
                                             const std::vector<double>& upper) {
  const int n = static_cast<int>(v.size());
  int patterns = 1;
  for (int k = 0; k < n; ++k) patterns *= 3;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> best;
  double best_dist = inf;
  std::vector<int> state(n);
  for (int code = 0; code < patterns; ++code) {
    int c = code;
    for (int k = 0; k < n; ++k) {
      state[k] = c % 3;  // 0: x=0, 1: x=upper, 2: free
      c /= 3;
    }
    double fixed = 0.0, vfree = 0.0;
    int nfree = 0;
    for (int k = 0; k < n; ++k) {
      if (state[k] == 1) fixed += upper[k];
      if (state[k] == 2) {
        ++nfree;
        vfree += v[k];
      }
    }
    double tau;
    if (nfree > 0) {
      tau = (vfree + fixed - total) / nfree;
    } else {
      if (std::abs(fixed - total) > 1e-9) continue;
      double lo = -inf, hi = inf;
      for (int k = 0; k < n; ++k) {
        if (state[k] == 1) lo = std::max(lo, v[k] - upper[k]);
        if (state[k] == 0) hi = std::min(hi, v[k]);
      }
      if (lo > hi + 1e-12) continue;
      if (std::isinf(lo) && std::isinf(hi))
        tau = 0.0;
      else if (std::isinf(lo))
        tau = hi;
      else if (std::isinf(hi))
        tau = lo;
      else
        tau = 0.5 * (lo + hi);
    }
    std::vector<double> x(n);
    bool ok = true;
    for (int k = 0; k < n && ok; ++k) {
      if (state[k] == 0) {
        x[k] = 0.0;
        ok = v[k] - tau <= 1e-9;
      } else if (state[k] == 1) {
        x[k] = upper[k];
        ok = v[k] - tau >= upper[k] - 1e-9;
      } else {
        x[k] = v[k] - tau;
        ok = x[k] >= -1e-9 && x[k] <= upper[k] + 1e-9;
      }
    }
    if (!ok) continue;
    double dist = 0.0;
    for (int k = 0; k < n; ++k) dist += (x[k] - v[k]) * (x[k] - v[k]);
    if (dist < best_dist) {
      best_dist = dist;
      best = x;
    }
  }
  return best;
}

// Grid search for source i's best response on a two-node instance: scans the
// single free coordinate at the given resolution and returns the best split.
inline std::vector<double> br_grid_oracle(const Instance& inst, int i,
                                          const std::vector<double>& p,
                                          double resolution = 1e-5) {
  const double lam = inst.lambda[i];
  const double lo = std::max(0.0, lam - inst.path_bound(i, 1));
  const double hi = std::min(lam, inst.path_bound(i, 0));
  const long long steps = std::llround((hi - lo) / resolution);
  double best_x = lo, best_f = std::numeric_limits<double>::infinity();
  for (long long k = 0; k <= steps; ++k) {
    const double x0 = std::min(hi, lo + resolution * static_cast<double>(k));
    const double x1 = lam - x0;
    double f = p[0] * x0 + p[1] * x1;
    if (x0 > 0.0) f += x0 * inst.access_fn(i, 0).value(x0);
    if (x1 > 0.0) f += x1 * inst.access_fn(i, 1).value(x1);
    if (f < best_f) {
      best_f = f;
      best_x = x0;
    }
  }
  return {best_x, lam - best_x};
}

}  // namespace testsupport

#endif  // MCROUTE_TESTS_SUPPORT_HPP
