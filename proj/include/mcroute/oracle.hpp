#ifndef MCROUTE_ORACLE_HPP
#define MCROUTE_ORACLE_HPP

#include "mcroute/exec.hpp"
#include "mcroute/model.hpp"

namespace mcroute {

struct OracleConfig {
  int grid_points = 101;   // per free dimension, >= 11
  int refine_rounds = 3;   // zoom-in passes after the full sweep, >= 1
  double shrink = 0.2;     // box shrink factor per refinement, in (0,1)
  Exec exec = Exec::parallel;
};

struct OracleResult {
  RoutingMatrix routing;
  double objective = 0.0;
  long long evaluations = 0;  // feasible grid points actually scored
};

// Exhaustive grid search over the feasible polytope, then refine_rounds
// zoom-ins around the incumbent. Each source's last coordinate is determined
// by its row sum, so the free dimension count is m*(n-1) and must be <= 4.
// Ground truth for solver tests; deterministic regardless of thread count.
OracleResult brute_force_optimum(const Instance& inst,
                                 const OracleConfig& cfg);

}  // namespace mcroute

#endif  // MCROUTE_ORACLE_HPP
