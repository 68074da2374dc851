#ifndef MCROUTE_MODEL_HPP
#define MCROUTE_MODEL_HPP

#include <vector>

#include "mcroute/delay.hpp"
#include "mcroute/matrix.hpp"

namespace mcroute {

/// One complete problem datum: offered rates, per-path access delay curves,
/// per-node service delay curves, and the feasibility margin.
///
/// All operations on an Instance are pure; the value is freely shareable
/// across threads.
struct Instance {
  int m = 0;  // sources
  int n = 0;  // nodes
  std::vector<double> lambda;          // offered rate per source, > 0
  std::vector<DelayFunction> access;   // m*n grid, row-major
  std::vector<DelayFunction> node;     // n entries
  double eps = 0.0;                    // feasibility margin, > 0

  const DelayFunction& access_fn(int i, int j) const {
    return access[static_cast<size_t>(i) * n + j];
  }
  const DelayFunction& node_fn(int j) const { return node[j]; }

  double access_cap(int i, int j) const { return access_fn(i, j).capacity(); }
  double node_cap(int j) const { return node[j].capacity(); }

  // Largest rate a path or node may carry when flagged feasible.
  double path_bound(int i, int j) const { return access_cap(i, j) - eps; }
  double node_bound(int j) const { return node_cap(j) - eps; }

  double total_rate() const;

  // Default margin when a file does not set one: 1e-6 times the smallest
  // capacity in the instance.
  static double default_eps(const std::vector<double>& mu_access,
                            const std::vector<double>& mu_node);
};

// Builds an all-M/M/1 instance and validates the invariants that can be
// checked eagerly: positive rates and capacities, positive margin, per-row
// and total necessary feasibility conditions. Throws ValidationError or
// InfeasibleError.
Instance make_mm1_instance(std::vector<double> lambda,
                           const Matrix& mu_access,
                           const std::vector<double>& mu_node,
                           double eps);

// As above but with caller-supplied delay grids (sizes m*n and n). The
// necessary feasibility checks use the curve capacities.
Instance make_instance(std::vector<double> lambda,
                       std::vector<DelayFunction> access,
                       std::vector<DelayFunction> node, double eps);

// Marginal costs at a routing: entry (i, j) of access is the marginal access
// cost at the routed rate, entry j of node is the marginal congestion cost
// at the aggregate load.
struct MarginalCosts {
  Matrix access;
  std::vector<double> node;
};

struct FeasibilityViolation {
  int i = -1;  // -1 for node violations
  int j = -1;  // -1 for row-sum violations
  double amount = 0.0;
};

struct FeasibilityReport {
  bool pass = false;
  std::vector<double> row_residuals;               // |sum_j r(i,j) - lambda_i|
  std::vector<FeasibilityViolation> negative;      // r(i,j) < -tol
  std::vector<FeasibilityViolation> path_over;     // r(i,j) > mu_ij - eps
  std::vector<FeasibilityViolation> node_over;     // load_j > mu_j - eps
};

/// Column sums of a routing: aggregate load per node.
std::vector<double> aggregate_loads(const RoutingMatrix& r);

// Flow-weighted total delay, evaluated in the separable form
// sum_ij g_ij(r_ij) + sum_j g_j(load_j) with g(x) = x*D(x).
// Throws DomainError at or beyond any pole, naming the path or node.
double objective(const Instance& inst, const RoutingMatrix& r);

// Same quantity evaluated as sum_ij r_ij * (D_ij(r_ij) + D_j(load_j)).
// Kept as an independent route for cross-checking the separable form.
double objective_composed(const Instance& inst, const RoutingMatrix& r);

// objective() that reports +infinity instead of throwing when the routing
// touches a pole. Line searches treat the pole as a barrier.
double objective_or_inf(const Instance& inst, const RoutingMatrix& r);

// Entry (i, j) is marginal_cost(access_ij, r_ij) + marginal_cost(node_j,
// load_j), the partial derivative of the objective.
Matrix gradient(const Instance& inst, const RoutingMatrix& r);

MarginalCosts marginal_costs(const Instance& inst, const RoutingMatrix& r);

// Objective with every delay evaluated at a rate clamped just inside its
// pole. Reporting only: keeps trace rows finite when an iterate transiently
// overloads a node.
double objective_clamped(const Instance& inst, const RoutingMatrix& r);

// Flow-weighted mean delay per source at the given routing. Rates beyond
// a pole are clamped just inside it so the result stays finite during
// transient overload; the utilization columns of a trace expose the
// violation itself.
std::vector<double> per_source_mean_delay(const Instance& inst,
                                          const RoutingMatrix& r);

// Checks shapes, row sums, nonnegativity and both capacity bounds.
// Violations beyond `tol` fail the report; the report carries them all.
FeasibilityReport check_feasible(const Instance& inst, const RoutingMatrix& r,
                                 double tol = 1e-9);

// Byte rate (MB/s, decimal units: 1 KB = 1e3 B, 1 MB = 1e6 B) of a bundle of
// traffic classes. Classes: 1 = 50 msg/s at 2 KB, 2 = 30 msg/s at 2 KB,
// 3 = 15 msg/s at 2 MB, 4 = 10 msg/s at 1 KB.
double traffic_class_rates(const std::vector<int>& classes);

}  // namespace mcroute

#endif  // MCROUTE_MODEL_HPP
