#include "mcroute/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace mcroute {

double Instance::total_rate() const {
  return std::accumulate(lambda.begin(), lambda.end(), 0.0);
}

double Instance::default_eps(const std::vector<double>& mu_access,
                             const std::vector<double>& mu_node) {
  double mn = std::numeric_limits<double>::infinity();
  for (double mu : mu_access) mn = std::min(mn, mu);
  for (double mu : mu_node) mn = std::min(mn, mu);
  return 1e-6 * mn;
}

namespace {

void validate_instance(const Instance& inst) {
  if (inst.m < 1 || inst.n < 1)
    throw ValidationError("instance needs at least one source and one node");
  if (!(inst.eps > 0.0))
    throw ValidationError("feasibility margin eps must be positive");
  for (int i = 0; i < inst.m; ++i)
    if (!(inst.lambda[i] > 0.0))
      throw ValidationError("lambda[" + std::to_string(i) +
                            "] must be positive, got " +
                            std::to_string(inst.lambda[i]));

  // Necessary conditions for a strictly feasible split to exist. The joint
  // (transportation) feasibility is established by initial_feasible.
  for (int i = 0; i < inst.m; ++i) {
    double row_cap = 0.0;
    for (int j = 0; j < inst.n; ++j)
      row_cap += std::max(0.0, inst.path_bound(i, j));
    if (row_cap < inst.lambda[i])
      throw InfeasibleError("source " + std::to_string(i + 1) +
                            ": total path capacity " + std::to_string(row_cap) +
                            " cannot carry rate " +
                            std::to_string(inst.lambda[i]));
  }
  double node_cap = 0.0;
  for (int j = 0; j < inst.n; ++j)
    node_cap += std::max(0.0, inst.node_bound(j));
  const double total = inst.total_rate();
  if (total > node_cap)
    throw InfeasibleError("total offered rate " + std::to_string(total) +
                          " exceeds total node capacity " +
                          std::to_string(node_cap));
}

}  // namespace

Instance make_instance(std::vector<double> lambda,
                       std::vector<DelayFunction> access,
                       std::vector<DelayFunction> node, double eps) {
  Instance inst;
  inst.m = static_cast<int>(lambda.size());
  inst.n = static_cast<int>(node.size());
  if (access.size() != static_cast<size_t>(inst.m) * inst.n)
    throw ValidationError("access delay grid has wrong shape");
  inst.lambda = std::move(lambda);
  inst.access = std::move(access);
  inst.node = std::move(node);
  inst.eps = eps;
  validate_instance(inst);
  return inst;
}

Instance make_mm1_instance(std::vector<double> lambda,
                           const Matrix& mu_access,
                           const std::vector<double>& mu_node, double eps) {
  const int m = static_cast<int>(lambda.size());
  const int n = static_cast<int>(mu_node.size());
  if (mu_access.rows != m || mu_access.cols != n)
    throw ValidationError("access capacity grid has wrong shape");
  std::vector<DelayFunction> access;
  access.reserve(static_cast<size_t>(m) * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      if (!(mu_access(i, j) > 0.0))
        throw ValidationError("mu_access[" + std::to_string(i + 1) + "][" +
                              std::to_string(j + 1) + "] must be positive");
      access.push_back(DelayFunction::mm1(mu_access(i, j)));
    }
  std::vector<DelayFunction> node;
  node.reserve(n);
  for (int j = 0; j < n; ++j) {
    if (!(mu_node[j] > 0.0))
      throw ValidationError("mu_node[" + std::to_string(j + 1) +
                            "] must be positive");
    node.push_back(DelayFunction::mm1(mu_node[j]));
  }
  return make_instance(std::move(lambda), std::move(access), std::move(node),
                       eps);
}

std::vector<double> aggregate_loads(const RoutingMatrix& r) {
  std::vector<double> loads(r.cols, 0.0);
  for (int i = 0; i < r.rows; ++i)
    for (int j = 0; j < r.cols; ++j) loads[j] += r(i, j);
  return loads;
}

namespace {

void check_shape(const Instance& inst, const RoutingMatrix& r) {
  if (r.rows != inst.m || r.cols != inst.n)
    throw ValidationError("routing matrix shape does not match instance");
}

void check_poles(const Instance& inst, const RoutingMatrix& r,
                 const std::vector<double>& loads) {
  for (int i = 0; i < inst.m; ++i)
    for (int j = 0; j < inst.n; ++j) {
      const double x = r(i, j);
      if (!(x >= 0.0) || !(x < inst.access_cap(i, j)))
        throw DomainError("path (" + std::to_string(i + 1) + "," +
                              std::to_string(j + 1) + ") rate " +
                              std::to_string(x) + " outside [0, " +
                              std::to_string(inst.access_cap(i, j)) + ")",
                          PoleSite::path, i, j);
    }
  for (int j = 0; j < inst.n; ++j)
    if (!(loads[j] < inst.node_cap(j)))
      throw DomainError("node " + std::to_string(j + 1) + " load " +
                            std::to_string(loads[j]) + " meets capacity " +
                            std::to_string(inst.node_cap(j)),
                        PoleSite::node, -1, j);
}

}  // namespace

double objective(const Instance& inst, const RoutingMatrix& r) {
  check_shape(inst, r);
  const auto loads = aggregate_loads(r);
  check_poles(inst, r, loads);
  double f = 0.0;
  for (int i = 0; i < inst.m; ++i)
    for (int j = 0; j < inst.n; ++j) {
      const double x = r(i, j);
      f += x * inst.access_fn(i, j).value(x);
    }
  for (int j = 0; j < inst.n; ++j)
    f += loads[j] * inst.node_fn(j).value(loads[j]);
  return f;
}

double objective_composed(const Instance& inst, const RoutingMatrix& r) {
  check_shape(inst, r);
  const auto loads = aggregate_loads(r);
  check_poles(inst, r, loads);
  double f = 0.0;
  for (int i = 0; i < inst.m; ++i)
    for (int j = 0; j < inst.n; ++j) {
      const double x = r(i, j);
      f += x * (inst.access_fn(i, j).value(x) +
                inst.node_fn(j).value(loads[j]));
    }
  return f;
}

double objective_or_inf(const Instance& inst, const RoutingMatrix& r) {
  const auto loads = aggregate_loads(r);
  for (int i = 0; i < inst.m; ++i)
    for (int j = 0; j < inst.n; ++j) {
      const double x = r(i, j);
      if (!(x >= 0.0) || !(x < inst.access_cap(i, j)))
        return std::numeric_limits<double>::infinity();
    }
  for (int j = 0; j < inst.n; ++j)
    if (!(loads[j] < inst.node_cap(j)))
      return std::numeric_limits<double>::infinity();
  return objective(inst, r);
}

Matrix gradient(const Instance& inst, const RoutingMatrix& r) {
  check_shape(inst, r);
  const auto loads = aggregate_loads(r);
  check_poles(inst, r, loads);
  Matrix g(inst.m, inst.n);
  std::vector<double> node_mc(inst.n);
  for (int j = 0; j < inst.n; ++j)
    node_mc[j] = inst.node_fn(j).marginal_cost(loads[j]);
  for (int i = 0; i < inst.m; ++i)
    for (int j = 0; j < inst.n; ++j)
      g(i, j) = inst.access_fn(i, j).marginal_cost(r(i, j)) + node_mc[j];
  return g;
}

MarginalCosts marginal_costs(const Instance& inst, const RoutingMatrix& r) {
  check_shape(inst, r);
  const auto loads = aggregate_loads(r);
  check_poles(inst, r, loads);
  MarginalCosts mc;
  mc.access = Matrix(inst.m, inst.n);
  mc.node.resize(inst.n);
  for (int j = 0; j < inst.n; ++j)
    mc.node[j] = inst.node_fn(j).marginal_cost(loads[j]);
  for (int i = 0; i < inst.m; ++i)
    for (int j = 0; j < inst.n; ++j)
      mc.access(i, j) = inst.access_fn(i, j).marginal_cost(r(i, j));
  return mc;
}

namespace {

// Evaluates a delay with the rate clamped just inside the pole. Used only
// for reporting quantities that must stay finite under transient overload.
double clamped_delay(const DelayFunction& f, double x) {
  const double hi = f.capacity() * (1.0 - 1e-9);
  return f.value(std::clamp(x, 0.0, hi));
}

}  // namespace

double objective_clamped(const Instance& inst, const RoutingMatrix& r) {
  check_shape(inst, r);
  const auto loads = aggregate_loads(r);
  double total = 0.0;
  for (int i = 0; i < inst.m; ++i)
    for (int j = 0; j < inst.n; ++j) {
      const double x = r(i, j);
      if (x <= 0.0) continue;
      total += x * (clamped_delay(inst.access_fn(i, j), x) +
                    clamped_delay(inst.node_fn(j), loads[j]));
    }
  return total;
}

std::vector<double> per_source_mean_delay(const Instance& inst,
                                          const RoutingMatrix& r) {
  check_shape(inst, r);
  const auto loads = aggregate_loads(r);
  std::vector<double> mean(inst.m, 0.0);
  for (int i = 0; i < inst.m; ++i) {
    double acc = 0.0;
    for (int j = 0; j < inst.n; ++j) {
      const double x = r(i, j);
      if (x <= 0.0) continue;
      acc += x * (clamped_delay(inst.access_fn(i, j), x) +
                  clamped_delay(inst.node_fn(j), loads[j]));
    }
    mean[i] = acc / inst.lambda[i];
  }
  return mean;
}

FeasibilityReport check_feasible(const Instance& inst, const RoutingMatrix& r,
                                 double tol) {
  check_shape(inst, r);
  FeasibilityReport rep;
  rep.row_residuals.resize(inst.m, 0.0);
  for (int i = 0; i < inst.m; ++i) {
    double sum = 0.0;
    for (int j = 0; j < inst.n; ++j) {
      const double x = r(i, j);
      sum += x;
      if (x < -tol) rep.negative.push_back({i, j, -x});
      const double over = x - inst.path_bound(i, j);
      if (over > tol) rep.path_over.push_back({i, j, over});
    }
    rep.row_residuals[i] = std::abs(sum - inst.lambda[i]);
  }
  const auto loads = aggregate_loads(r);
  for (int j = 0; j < inst.n; ++j) {
    const double over = loads[j] - inst.node_bound(j);
    if (over > tol) rep.node_over.push_back({-1, j, over});
  }
  bool rows_ok = true;
  for (int i = 0; i < inst.m; ++i)
    if (rep.row_residuals[i] > tol * std::max(1.0, inst.lambda[i]))
      rows_ok = false;
  rep.pass = rows_ok && rep.negative.empty() && rep.path_over.empty() &&
             rep.node_over.empty();
  return rep;
}

double traffic_class_rates(const std::vector<int>& classes) {
  // msg/s times bytes per message, decimal KB/MB.
  double bytes_per_s = 0.0;
  for (int c : classes) {
    switch (c) {
      case 1: bytes_per_s += 50.0 * 2e3; break;
      case 2: bytes_per_s += 30.0 * 2e3; break;
      case 3: bytes_per_s += 15.0 * 2e6; break;
      case 4: bytes_per_s += 10.0 * 1e3; break;
      default:
        throw ValidationError("unknown traffic class id " + std::to_string(c) +
                              " (known ids: 1..4)");
    }
  }
  return bytes_per_s / 1e6;
}

}  // namespace mcroute
