#ifndef MCROUTE_CENTRAL_HPP
#define MCROUTE_CENTRAL_HPP

#include <vector>

#include "mcroute/model.hpp"
#include "mcroute/trace.hpp"

namespace mcroute {

struct CentralConfig {
  int max_iters = 5000;
  double grad_tol = 1e-7;        // stationarity residual threshold
  double step_init = 1.0;
  double backtrack_factor = 0.5;
  double armijo_c = 1e-4;
};

/// Per-source total-marginal-cost equalization diagnostics at a routing.
///
/// For each source, alpha is the cheapest total marginal cost over its
/// routes, spread is the worst equalization error over used routes, and
/// slack is the margin by which unused routes stay at least as expensive.
struct WardropReport {
  std::vector<double> alpha;       // min_j M_ij per source
  std::vector<double> spread;      // max |M_ij - alpha_i| over used routes
  std::vector<double> slack;       // min (M_ij - alpha_i) over unused routes
                                   // (+inf when every route is used)
  Matrix total_marginal;           // M_ij = C_ij + C_j
  std::vector<std::vector<bool>> used;   // r(i,j) > use_threshold_i
  Matrix beta;                     // max(0, M_ij - alpha_i) on unused routes
  std::vector<bool> node_bound_active;   // load_j within tol of mu_j - eps
  std::vector<bool> degenerate;          // several routes tie at alpha_i
                                         // exactly while unused
  double tol = 0.0;
  bool pass = false;               // spread <= tol and slack >= -tol
};

struct CentralResult {
  RoutingMatrix routing;
  Trace trace;
  bool converged = false;   // certificate reached before max_iters
  int iters = 0;
  double objective = 0.0;
  double spread = 0.0;           // max over sources at the final point
  double slack = 0.0;            // min over sources at the final point
  double step_residual = 0.0;    // sup-norm of the probe projected step
  WardropReport report;
};

// Strictly feasible start: proportional-to-residual-capacity fill per row,
// then iterative repair of overloaded nodes (at most 100 passes). Throws
// InfeasibleError naming the blocking constraint when repair fails.
RoutingMatrix initial_feasible(const Instance& inst);

// Euclidean projection of v onto {x >= 0, x <= upper, sum x = total}.
// Throws InfeasibleError when sum(upper) < total.
std::vector<double> project_row_simplex(const std::vector<double>& v,
                                        double total,
                                        const std::vector<double>& upper);

// Total marginal costs, per-source equalization spread and unused-route
// slack at a routing. use_threshold scales per source as use_threshold *
// lambda_i when relative=true (the default call sites pass 1e-8).
WardropReport wardrop_report(const Instance& inst, const RoutingMatrix& r,
                             double use_threshold, double tol);

// Projected gradient with Armijo backtracking on the product of per-source
// capped simplices. Steps that would overload a node are shortened to the
// exact boundary; the diverging objective rejects steps past a pole.
// Converges when the equalization certificate holds at grad_tol, or when the
// probe projected step collapses (active node bound at the optimum).
CentralResult solve_central(const Instance& inst, const CentralConfig& cfg);

}  // namespace mcroute

#endif  // MCROUTE_CENTRAL_HPP
