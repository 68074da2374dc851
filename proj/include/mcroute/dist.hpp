#ifndef MCROUTE_DIST_HPP
#define MCROUTE_DIST_HPP

#include <vector>

#include "mcroute/exec.hpp"
#include "mcroute/model.hpp"
#include "mcroute/trace.hpp"

namespace mcroute {

// Per-node congestion prices, delay units.
using PriceVector = std::vector<double>;

enum class StepSchedule { constant, diminishing };

struct DistConfig {
  double eta = 0.3;    // source damping, in (0,1]
  double gamma = 0.5;  // price damping, in (0,1]
  int max_iters = 400;
  double rel_tol = 1e-7;
  StepSchedule schedule = StepSchedule::constant;
  double decay = 0.01;  // diminishing schedule: eta_t = eta / (1 + decay*t)
  Exec exec = Exec::parallel;
};

struct DistResult {
  RoutingMatrix routing;
  PriceVector prices;
  bool converged = false;
  int iters = 0;
  Trace trace;
  // max of the price residual |p_j - C_j(load_j)| and the best-response
  // residual max|r - BR(p)| at the returned state.
  double fixed_point_residual = 0.0;
};

// Ceiling applied to prices so transient overloads keep every quantity
// finite: 1e6 times the largest marginal node cost at 99% of the usable
// node range.
double price_cap(const Instance& inst);

// Marginal-cost price per node at the given aggregate loads, capped at
// price_cap(inst). Never throws; overloaded nodes report the cap.
PriceVector node_price(const Instance& inst, const std::vector<double>& loads);

// Componentwise p <- (1-gamma)*p + gamma*phat.
PriceVector damped_price_update(const PriceVector& p, const PriceVector& phat,
                                double gamma);

// Source i's optimal split against the posted prices: minimizes
// sum_j (x_j * D_ij(x_j) + p_j * x_j) over the capped simplex, by bisection
// on the dual value alpha. The row sums to lambda_i exactly. Writes the
// final alpha through alpha_out when given.
std::vector<double> best_response(const Instance& inst, int i,
                                  const PriceVector& p,
                                  double* alpha_out = nullptr);

// Componentwise r <- (1-eta)*r + eta*br; row sums and bounds are preserved
// because both arguments satisfy them.
RoutingMatrix damped_route_update(const RoutingMatrix& r,
                                  const RoutingMatrix& br, double eta);

// Synchronous rounds of price update, broadcast, per-source best response,
// damped route update. Stops when both the relative routing change
// (Frobenius) and every node's relative price change fall below rel_tol.
// Non-convergence is reported, not thrown; the trace covers every round.
DistResult run_distributed(const Instance& inst, const DistConfig& cfg);

}  // namespace mcroute

#endif  // MCROUTE_DIST_HPP
