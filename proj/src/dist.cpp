#include "mcroute/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mcroute/central.hpp"
#include "mcroute/errors.hpp"

namespace mcroute {

// Damping only decays flow on routes the best response has dropped, so a
// near-fixed-point iterate can still carry stray flow there. Convergence
// waits until such flow sits safely below the route-use classification
// threshold (1e-8 of the source rate).
constexpr double kAbandonedFlowTol = 1e-9;

double price_cap(const Instance& inst) {
  double worst = 0.0;
  for (int j = 0; j < inst.n; ++j)
    worst = std::max(worst,
                     inst.node_fn(j).marginal_cost(0.99 * inst.node_bound(j)));
  return 1e6 * worst;
}

PriceVector node_price(const Instance& inst,
                       const std::vector<double>& loads) {
  const double cap = price_cap(inst);
  PriceVector p(inst.n);
  for (int j = 0; j < inst.n; ++j) {
    const auto& f = inst.node_fn(j);
    p[j] = loads[j] < f.capacity()
               ? std::min(f.marginal_cost(loads[j]), cap)
               : cap;
  }
  return p;
}

PriceVector damped_price_update(const PriceVector& p, const PriceVector& phat,
                                double gamma) {
  PriceVector out(p.size());
  for (size_t j = 0; j < p.size(); ++j)
    out[j] = (1.0 - gamma) * p[j] + gamma * phat[j];
  return out;
}

std::vector<double> best_response(const Instance& inst, int i,
                                  const PriceVector& p, double* alpha_out) {
  const int n = inst.n;
  const double rate = inst.lambda[i];

  std::vector<double> bound(n);
  double bound_sum = 0.0;
  for (int j = 0; j < n; ++j) {
    bound[j] = inst.path_bound(i, j);
    bound_sum += bound[j];
  }
  if (bound_sum < rate)
    throw BestResponseInfeasible(
        "source " + std::to_string(i + 1) + ": path bounds sum to " +
        std::to_string(bound_sum) + " < rate " + std::to_string(rate));

  // The subproblem is separable and convex; at dual value alpha the optimal
  // allocation per route is 0 below the entry threshold p_j + C_ij(0) and
  // the (capped) inverse marginal cost above it. The total allocation is
  // nondecreasing in alpha, so bisect.
  auto row_at = [&](double alpha, std::vector<double>& x) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const auto& f = inst.access_fn(i, j);
      const double margin = alpha - p[j];
      if (margin <= f.marginal_cost(0.0)) {
        x[j] = 0.0;
      } else {
        x[j] = std::min(f.inverse_marginal_cost(margin), bound[j]);
      }
      sum += x[j];
    }
    return sum;
  };

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    const auto& f = inst.access_fn(i, j);
    lo = std::min(lo, p[j] + f.marginal_cost(0.0));
    hi = std::max(hi, p[j] + f.marginal_cost(bound[j]));
  }

  std::vector<double> x(n, 0.0);
  const double target_tol = 1e-10 * rate;
  double alpha = hi;
  for (int it = 0; it < 200; ++it) {
    alpha = 0.5 * (lo + hi);
    const double sum = row_at(alpha, x);
    if (std::abs(sum - rate) <= target_tol) break;
    if (sum < rate)
      lo = alpha;
    else
      hi = alpha;
    if (hi - lo <= 1e-16 * std::max(1.0, std::abs(hi))) break;
  }
  row_at(alpha, x);
  fix_row_sum(x, rate, bound);
  if (alpha_out) *alpha_out = alpha;
  return x;
}

RoutingMatrix damped_route_update(const RoutingMatrix& r,
                                  const RoutingMatrix& br, double eta) {
  RoutingMatrix out(r.rows, r.cols);
  for (size_t k = 0; k < r.data.size(); ++k)
    out.data[k] = (1.0 - eta) * r.data[k] + eta * br.data[k];
  return out;
}

namespace {

void best_response_round(const Instance& inst, const PriceVector& p,
                         Exec exec, RoutingMatrix& br,
                         std::vector<double>& alpha) {
#ifdef _OPENMP
  if (exec == Exec::parallel) {
    // Rows are computed independently and written to disjoint slots, so the
    // merge is deterministic by construction.
#pragma omp parallel for schedule(static)
    for (int i = 0; i < inst.m; ++i) {
      const auto row = best_response(inst, i, p, &alpha[i]);
      for (int j = 0; j < inst.n; ++j) br(i, j) = row[j];
    }
    return;
  }
#else
  (void)exec;
#endif
  for (int i = 0; i < inst.m; ++i) {
    const auto row = best_response(inst, i, p, &alpha[i]);
    for (int j = 0; j < inst.n; ++j) br(i, j) = row[j];
  }
}

}  // namespace

DistResult run_distributed(const Instance& inst, const DistConfig& cfg) {
  if (!(cfg.eta > 0.0 && cfg.eta <= 1.0))
    throw ValidationError("eta must be in (0,1], got " +
                          std::to_string(cfg.eta));
  if (!(cfg.gamma > 0.0 && cfg.gamma <= 1.0))
    throw ValidationError("gamma must be in (0,1], got " +
                          std::to_string(cfg.gamma));
  if (!(cfg.rel_tol > 0.0))
    throw ValidationError("rel_tol must be positive, got " +
                          std::to_string(cfg.rel_tol));
  if (cfg.max_iters < 1)
    throw ValidationError("max_iters must be at least 1, got " +
                          std::to_string(cfg.max_iters));

  DistResult res;
  res.routing = initial_feasible(inst);
  res.prices = node_price(inst, aggregate_loads(res.routing));

  RoutingMatrix br(inst.m, inst.n);
  std::vector<double> alpha(inst.m, 0.0);

  for (int t = 0; t < cfg.max_iters; ++t) {
    const double eta_t = cfg.schedule == StepSchedule::diminishing
                             ? cfg.eta / (1.0 + cfg.decay * t)
                             : cfg.eta;

    const PriceVector phat = node_price(inst, aggregate_loads(res.routing));
    const PriceVector p_new = damped_price_update(res.prices, phat, cfg.gamma);

    best_response_round(inst, p_new, cfg.exec, br, alpha);
    RoutingMatrix r_new = damped_route_update(res.routing, br, eta_t);

    double step_sq = 0.0;
    for (size_t k = 0; k < r_new.data.size(); ++k) {
      const double d = r_new.data[k] - res.routing.data[k];
      step_sq += d * d;
    }
    const double step_norm = std::sqrt(step_sq);
    const double route_change =
        step_norm / std::max(frobenius_norm(res.routing), 1e-300);
    double price_change = 0.0;
    for (int j = 0; j < inst.n; ++j)
      price_change = std::max(price_change,
                              std::abs(p_new[j] - res.prices[j]) /
                                  std::max(res.prices[j], 1e-300));
    double abandoned = 0.0;
    for (int i = 0; i < inst.m; ++i)
      for (int j = 0; j < inst.n; ++j)
        if (br(i, j) == 0.0)
          abandoned = std::max(abandoned, r_new(i, j) / inst.lambda[i]);

    res.routing = std::move(r_new);
    res.prices = p_new;
    res.iters = t + 1;

    TraceRow row;
    row.iter = t + 1;
    row.objective = objective_clamped(inst, res.routing);
    row.step_norm = step_norm;
    row.loads = aggregate_loads(res.routing);
    row.prices = res.prices;
    row.mean_delay = per_source_mean_delay(inst, res.routing);
    row.alpha = alpha;
    res.trace.push_back(std::move(row));

    if (route_change < cfg.rel_tol && price_change < cfg.rel_tol &&
        abandoned <= kAbandonedFlowTol) {
      res.converged = true;
      break;
    }
  }

  // Residual of the fixed-point conditions at the returned state.
  const PriceVector p_now = node_price(inst, aggregate_loads(res.routing));
  double residual = 0.0;
  for (int j = 0; j < inst.n; ++j)
    residual = std::max(residual, std::abs(res.prices[j] - p_now[j]));
  best_response_round(inst, res.prices, cfg.exec, br, alpha);
  residual = std::max(residual, max_abs_diff(res.routing, br));
  res.fixed_point_residual = residual;
  return res;
}

}  // namespace mcroute
