#include "mcroute/central.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mcroute {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::vector<double> project_row_simplex(const std::vector<double>& v,
                                        double total,
                                        const std::vector<double>& upper) {
  const int n = static_cast<int>(v.size());
  double cap_sum = 0.0;
  for (int j = 0; j < n; ++j) {
    if (upper[j] < 0.0)
      throw InfeasibleError("projection upper bound " +
                            std::to_string(upper[j]) + " is negative");
    cap_sum += upper[j];
  }
  if (cap_sum < total)
    throw InfeasibleError("projection infeasible: bounds sum to " +
                          std::to_string(cap_sum) + " < total " +
                          std::to_string(total));

  // The projection is clamp(v - shift, 0, upper) for the shift making the
  // coordinates sum to `total`. The sum is continuous and non-increasing in
  // the shift, so bisection pins it down.
  double lo = v[0] - upper[0];
  double hi = v[0];
  for (int j = 1; j < n; ++j) {
    lo = std::min(lo, v[j] - upper[j]);
    hi = std::max(hi, v[j]);
  }
  auto sum_at = [&](double shift) {
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      s += std::clamp(v[j] - shift, 0.0, upper[j]);
    return s;
  };
  for (int it = 0; it < 128 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sum_at(mid) > total)
      lo = mid;
    else
      hi = mid;
  }
  const double shift = 0.5 * (lo + hi);
  std::vector<double> x(n);
  for (int j = 0; j < n; ++j) x[j] = std::clamp(v[j] - shift, 0.0, upper[j]);
  fix_row_sum(x, total, upper);
  return x;
}

RoutingMatrix initial_feasible(const Instance& inst) {
  const int m = inst.m;
  const int n = inst.n;
  RoutingMatrix r(m, n);

  // Proportional-to-capacity fill per row, projected onto the capped
  // simplex so path bounds hold from the start.
  for (int i = 0; i < m; ++i) {
    std::vector<double> caps(n), v(n);
    double cap_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      caps[j] = std::max(0.0, inst.path_bound(i, j));
      cap_sum += caps[j];
    }
    for (int j = 0; j < n; ++j) v[j] = inst.lambda[i] * caps[j] / cap_sum;
    const auto row = project_row_simplex(v, inst.lambda[i], caps);
    for (int j = 0; j < n; ++j) r(i, j) = row[j];
  }

  // Repair node overloads: scale down overloaded columns, then refill each
  // source's deficit proportionally to the joint path-and-node headroom.
  for (int pass = 0; pass < 100; ++pass) {
    auto loads = aggregate_loads(r);
    bool overloaded = false;
    for (int j = 0; j < n; ++j) {
      const double bound = inst.node_bound(j);
      if (loads[j] > bound) {
        overloaded = true;
        const double scale = bound / loads[j];
        for (int i = 0; i < m; ++i) r(i, j) *= scale;
        loads[j] = bound;
      }
    }

    std::vector<double> deficit(m, 0.0);
    double total_deficit = 0.0;
    for (int i = 0; i < m; ++i) {
      double sum = 0.0;
      for (int j = 0; j < n; ++j) sum += r(i, j);
      deficit[i] = inst.lambda[i] - sum;
      total_deficit += std::max(0.0, deficit[i]);
    }
    if (!overloaded && total_deficit <= 1e-12 * std::max(1.0, inst.total_rate()))
      break;
    if (total_deficit <= 0.0) continue;

    for (int i = 0; i < m; ++i) {
      if (deficit[i] <= 0.0) continue;
      const double share = deficit[i] / total_deficit;
      std::vector<double> addable(n);
      double addable_sum = 0.0;
      for (int j = 0; j < n; ++j) {
        const double path_room = inst.path_bound(i, j) - r(i, j);
        const double node_room = (inst.node_bound(j) - loads[j]) * share;
        addable[j] = std::max(0.0, std::min(path_room, node_room));
        addable_sum += addable[j];
      }
      if (addable_sum <= 0.0) continue;
      const double fill = std::min(1.0, deficit[i] / addable_sum);
      for (int j = 0; j < n; ++j) r(i, j) += addable[j] * fill;
    }
  }

  // Exact row sums, using only coordinates with room under both bounds.
  auto loads = aggregate_loads(r);
  for (int i = 0; i < m; ++i) {
    std::vector<double> x(n), upper(n);
    for (int j = 0; j < n; ++j) {
      x[j] = r(i, j);
      upper[j] = std::min(inst.path_bound(i, j),
                          x[j] + std::max(0.0, inst.node_bound(j) - loads[j]));
    }
    fix_row_sum(x, inst.lambda[i], upper);
    for (int j = 0; j < n; ++j) {
      loads[j] += x[j] - r(i, j);
      r(i, j) = x[j];
    }
  }

  const auto rep = check_feasible(inst, r);
  if (!rep.pass) {
    std::string msg = "no strictly feasible start found:";
    for (int i = 0; i < m; ++i)
      if (rep.row_residuals[i] > 1e-9 * std::max(1.0, inst.lambda[i]))
        msg += " source " + std::to_string(i + 1) + " short by " +
               std::to_string(rep.row_residuals[i]) + ";";
    for (const auto& v : rep.node_over)
      msg += " node " + std::to_string(v.j + 1) + " over by " +
             std::to_string(v.amount) + ";";
    for (const auto& v : rep.path_over)
      msg += " path (" + std::to_string(v.i + 1) + "," +
             std::to_string(v.j + 1) + ") over by " +
             std::to_string(v.amount) + ";";
    throw InfeasibleError(msg);
  }
  return r;
}

WardropReport wardrop_report(const Instance& inst, const RoutingMatrix& r,
                             double use_threshold, double tol) {
  const auto mc = marginal_costs(inst, r);
  const auto loads = aggregate_loads(r);
  const int m = inst.m;
  const int n = inst.n;

  WardropReport rep;
  rep.tol = tol;
  rep.total_marginal = Matrix(m, n);
  rep.beta = Matrix(m, n);
  rep.alpha.resize(m);
  rep.spread.resize(m);
  rep.slack.resize(m);
  rep.used.assign(m, std::vector<bool>(n, false));
  rep.degenerate.assign(m, false);
  rep.node_bound_active.resize(n);

  for (int j = 0; j < n; ++j)
    rep.node_bound_active[j] =
        loads[j] >= inst.node_bound(j) - 1e-7 * std::max(1.0, inst.node_bound(j));

  for (int i = 0; i < m; ++i) {
    double alpha = kInf;
    for (int j = 0; j < n; ++j) {
      rep.total_marginal(i, j) = mc.access(i, j) + mc.node[j];
      alpha = std::min(alpha, rep.total_marginal(i, j));
    }
    rep.alpha[i] = alpha;
    double spread = 0.0;
    double slack = kInf;
    for (int j = 0; j < n; ++j) {
      const double excess = rep.total_marginal(i, j) - alpha;
      if (r(i, j) > use_threshold * inst.lambda[i]) {
        rep.used[i][j] = true;
        spread = std::max(spread, excess);
      } else {
        slack = std::min(slack, excess);
        rep.beta(i, j) = std::max(0.0, excess);
        if (excess <= 1e-12 * std::max(1.0, alpha)) rep.degenerate[i] = true;
      }
    }
    rep.spread[i] = spread;
    rep.slack[i] = slack;
  }

  bool pass = true;
  for (int i = 0; i < m; ++i)
    if (rep.spread[i] > tol || rep.slack[i] < -tol) pass = false;
  rep.pass = pass;
  return rep;
}

namespace {

// One projected-gradient candidate: per-row capped-simplex projection with
// the upper bounds tightened by the current node headroom, then a global
// shortening to the exact node boundary if the simultaneous row updates
// still jointly overshoot it.
RoutingMatrix project_step(const Instance& inst, const RoutingMatrix& r,
                           const Matrix& grad,
                           const std::vector<double>& loads, double step) {
  const int m = inst.m;
  const int n = inst.n;
  RoutingMatrix y(m, n);
  for (int i = 0; i < m; ++i) {
    std::vector<double> v(n), upper(n);
    for (int j = 0; j < n; ++j) {
      const double headroom = std::max(0.0, inst.node_bound(j) - loads[j]);
      upper[j] = std::min(inst.path_bound(i, j), r(i, j) + headroom);
      v[j] = r(i, j) - step * grad(i, j);
    }
    const auto row = project_row_simplex(v, inst.lambda[i], upper);
    for (int j = 0; j < n; ++j) y(i, j) = row[j];
  }

  const auto new_loads = aggregate_loads(y);
  double theta = 1.0;
  for (int j = 0; j < n; ++j) {
    const double bound = inst.node_bound(j);
    if (new_loads[j] > bound) {
      const double delta = new_loads[j] - loads[j];
      if (delta > 0.0)
        theta = std::min(theta, (bound - loads[j]) / delta);
    }
  }
  if (theta < 1.0) {
    theta = std::max(0.0, theta);
    for (size_t k = 0; k < y.data.size(); ++k)
      y.data[k] = r.data[k] + theta * (y.data[k] - r.data[k]);
  }
  return y;
}

double inner(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  for (size_t k = 0; k < a.data.size(); ++k) s += a.data[k] * b.data[k];
  return s;
}

}  // namespace

CentralResult solve_central(const Instance& inst, const CentralConfig& cfg) {
  if (cfg.max_iters < 1)
    throw ValidationError("max_iters must be at least 1, got " +
                          std::to_string(cfg.max_iters));
  if (!(cfg.grad_tol > 0.0) || !(cfg.step_init > 0.0))
    throw ValidationError("grad_tol and step_init must be positive");
  if (!(cfg.backtrack_factor > 0.0 && cfg.backtrack_factor < 1.0) ||
      !(cfg.armijo_c > 0.0 && cfg.armijo_c < 1.0))
    throw ValidationError("backtrack_factor and armijo_c must be in (0,1)");

  CentralResult res;
  res.routing = initial_feasible(inst);
  double f = objective(inst, res.routing);

  const double use_threshold = 1e-8;
  double lambda_max = 0.0;
  for (double l : inst.lambda) lambda_max = std::max(lambda_max, l);
  const double stall_tol = cfg.grad_tol * std::max(1.0, lambda_max);

  // The probe-step stall exit is reserved for optima pinned to a node bound,
  // where marginal costs cannot equalize; interior optima must earn the
  // equalization certificate itself. An exactly-zero probe step means the
  // feasible set admits no movement at all and counts as converged too.
  const auto stalled_on_bound = [&](const WardropReport& wr, double residual) {
    if (residual > stall_tol) return false;
    if (residual == 0.0) return true;
    for (bool active : wr.node_bound_active)
      if (active) return true;
    return false;
  };

  double step = cfg.step_init;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const auto loads = aggregate_loads(res.routing);
    const Matrix grad_now = gradient(inst, res.routing);
    const auto wr = wardrop_report(inst, res.routing, use_threshold,
                                   cfg.grad_tol);

    double spread = 0.0;
    double slack = kInf;
    for (int i = 0; i < inst.m; ++i) {
      spread = std::max(spread, wr.spread[i]);
      slack = std::min(slack, wr.slack[i]);
    }
    const RoutingMatrix probe =
        project_step(inst, res.routing, grad_now, loads, cfg.step_init);
    const double step_residual = max_abs_diff(probe, res.routing);

    res.iters = iter;
    res.spread = spread;
    res.slack = slack;
    res.step_residual = step_residual;
    res.report = wr;
    if (wr.pass || stalled_on_bound(wr, step_residual)) {
      res.converged = true;
      break;
    }

    // Armijo backtracking from a warm-started trial step.
    RoutingMatrix accepted;
    double f_accepted = f;
    bool found = false;
    double t = step;
    for (int ls = 0; ls < 80; ++ls) {
      RoutingMatrix cand = project_step(inst, res.routing, grad_now, loads, t);
      Matrix diff(inst.m, inst.n);
      for (size_t k = 0; k < cand.data.size(); ++k)
        diff.data[k] = cand.data[k] - res.routing.data[k];
      const double gd = inner(grad_now, diff);
      const double f_cand = objective_or_inf(inst, cand);
      if (std::isfinite(f_cand) && f_cand <= f + cfg.armijo_c * gd) {
        accepted = std::move(cand);
        f_accepted = f_cand;
        found = true;
        break;
      }
      t *= cfg.backtrack_factor;
      if (t < 1e-18) break;
    }
    if (!found) {
      // No descent step exists at any scale; the probe residual above will
      // report how far from stationary the point is.
      res.converged = stalled_on_bound(wr, step_residual);
      break;
    }

    double step_norm = 0.0;
    for (size_t k = 0; k < accepted.data.size(); ++k) {
      const double d = accepted.data[k] - res.routing.data[k];
      step_norm += d * d;
    }
    step_norm = std::sqrt(step_norm);

    res.routing = std::move(accepted);
    f = f_accepted;
    step = std::min(2.0 * t, 1e6);

    TraceRow row;
    row.iter = iter + 1;
    row.objective = f;
    row.step_norm = step_norm;
    row.loads = aggregate_loads(res.routing);
    row.mean_delay = per_source_mean_delay(inst, res.routing);
    res.trace.push_back(std::move(row));
  }

  if (!res.converged) {
    // Loop ran out of iterations (or stalled); refresh the certificate for
    // the point actually returned.
    const auto loads = aggregate_loads(res.routing);
    const Matrix grad_now = gradient(inst, res.routing);
    const auto wr = wardrop_report(inst, res.routing, use_threshold,
                                   cfg.grad_tol);
    double spread = 0.0;
    double slack = kInf;
    for (int i = 0; i < inst.m; ++i) {
      spread = std::max(spread, wr.spread[i]);
      slack = std::min(slack, wr.slack[i]);
    }
    const RoutingMatrix probe =
        project_step(inst, res.routing, grad_now, loads, cfg.step_init);
    res.spread = spread;
    res.slack = slack;
    res.step_residual = max_abs_diff(probe, res.routing);
    res.report = wr;
    res.iters = cfg.max_iters;
    if (wr.pass || stalled_on_bound(wr, res.step_residual))
      res.converged = true;
  }

  res.objective = f;
  if (res.trace.empty()) {
    TraceRow row;
    row.iter = 0;
    row.objective = f;
    row.step_norm = 0.0;
    row.loads = aggregate_loads(res.routing);
    row.mean_delay = per_source_mean_delay(inst, res.routing);
    res.trace.push_back(std::move(row));
  }
  return res;
}

}  // namespace mcroute
