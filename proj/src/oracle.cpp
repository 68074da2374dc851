#include "mcroute/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mcroute/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mcroute {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

struct SweepBest {
  double value = kInf;
  long long index = -1;
};

bool better(const SweepBest& a, const SweepBest& b) {
  if (a.value != b.value) return a.value < b.value;
  return a.index < b.index;
}

// Decode a flat grid index into a routing; returns false when the point is
// outside the feasible polytope (determined coordinate or node load over
// bound). Free coordinates are row-major with the last grid dimension
// fastest, so flat-index order is lexicographic in the multi-index.
bool decode(const Instance& inst, const Box& box, int grid_points,
            long long flat, RoutingMatrix& out) {
  const int m = inst.m;
  const int n = inst.n;
  const int free_per_row = n - 1;
  const int d = m * free_per_row;

  for (int k = d - 1; k >= 0; --k) {
    const long long t = flat % grid_points;
    flat /= grid_points;
    const int i = k / free_per_row;
    const int j = k % free_per_row;
    double x = box.lo[k];
    if (grid_points > 1)
      x += (box.hi[k] - box.lo[k]) *
           (static_cast<double>(t) / (grid_points - 1));
    out(i, j) = x;
  }

  for (int i = 0; i < m; ++i) {
    double used = 0.0;
    for (int j = 0; j < free_per_row; ++j) used += out(i, j);
    const double last = inst.lambda[i] - used;
    if (last < 0.0 || last > inst.path_bound(i, n - 1)) return false;
    out(i, n - 1) = last;
  }
  for (int j = 0; j < n; ++j) {
    double load = 0.0;
    for (int i = 0; i < m; ++i) load += out(i, j);
    if (load > inst.node_bound(j)) return false;
  }
  return true;
}

SweepBest sweep_serial(const Instance& inst, const Box& box, int grid_points,
                       long long count, long long& evals) {
  SweepBest best;
  RoutingMatrix r(inst.m, inst.n);
  for (long long flat = 0; flat < count; ++flat) {
    if (!decode(inst, box, grid_points, flat, r)) continue;
    ++evals;
    const double f = objective_composed(inst, r);
    if (f < best.value) best = {f, flat};
  }
  return best;
}

SweepBest sweep_parallel(const Instance& inst, const Box& box,
                         int grid_points, long long count, long long& evals) {
#ifdef _OPENMP
  SweepBest best;
  long long total_evals = 0;
#pragma omp parallel
  {
    SweepBest local;
    long long local_evals = 0;
    RoutingMatrix r(inst.m, inst.n);
#pragma omp for schedule(static) nowait
    for (long long flat = 0; flat < count; ++flat) {
      if (!decode(inst, box, grid_points, flat, r)) continue;
      ++local_evals;
      const double f = objective_composed(inst, r);
      if (f < local.value || (f == local.value && flat < local.index))
        local = {f, flat};
    }
#pragma omp critical
    {
      if (better(local, best)) best = local;
      total_evals += local_evals;
    }
  }
  evals += total_evals;
  return best;
#else
  return sweep_serial(inst, box, grid_points, count, evals);
#endif
}

}  // namespace

OracleResult brute_force_optimum(const Instance& inst,
                                 const OracleConfig& cfg) {
  if (cfg.grid_points < 11)
    throw ValidationError("oracle grid_points must be >= 11, got " +
                          std::to_string(cfg.grid_points));
  if (cfg.refine_rounds < 1)
    throw ValidationError("oracle refine_rounds must be >= 1, got " +
                          std::to_string(cfg.refine_rounds));
  if (!(cfg.shrink > 0.0 && cfg.shrink < 1.0))
    throw ValidationError("oracle shrink must be in (0,1), got " +
                          std::to_string(cfg.shrink));

  const int m = inst.m;
  const int n = inst.n;
  const int free_per_row = n - 1;
  const int d = m * free_per_row;
  if (d > 4)
    throw DimensionTooLarge("brute_force_optimum handles at most 4 free "
                            "dimensions, instance has " + std::to_string(d));

  // Outer box: each free coordinate ranges over [0, min(path bound, rate)].
  // Path and node bounds already sit an eps-collar inside every pole.
  Box outer;
  outer.lo.assign(d, 0.0);
  outer.hi.resize(d);
  for (int k = 0; k < d; ++k) {
    const int i = k / free_per_row;
    const int j = k % free_per_row;
    outer.hi[k] = std::min(inst.path_bound(i, j), inst.lambda[i]);
  }

  long long count = 1;
  for (int k = 0; k < d; ++k) count *= cfg.grid_points;

  OracleResult res;
  res.routing = RoutingMatrix(m, n);
  double best_value = kInf;
  Box box = outer;

  for (int round = 0; round <= cfg.refine_rounds; ++round) {
    SweepBest best = cfg.exec == Exec::parallel
                         ? sweep_parallel(inst, box, cfg.grid_points, count,
                                          res.evaluations)
                         : sweep_serial(inst, box, cfg.grid_points, count,
                                        res.evaluations);
    if (best.index >= 0 && best.value < best_value) {
      best_value = best.value;
      decode(inst, box, cfg.grid_points, best.index, res.routing);
    }
    if (best_value == kInf)
      throw InfeasibleError("no feasible grid point found; polytope thinner "
                            "than the grid resolution");

    // Zoom around the incumbent, clipped to the outer feasible box.
    Box next;
    next.lo.resize(d);
    next.hi.resize(d);
    for (int k = 0; k < d; ++k) {
      const int i = k / free_per_row;
      const int j = k % free_per_row;
      const double c = res.routing(i, j);
      const double hw = 0.5 * (box.hi[k] - box.lo[k]) * cfg.shrink;
      next.lo[k] = std::max(outer.lo[k], c - hw);
      next.hi[k] = std::min(outer.hi[k], c + hw);
    }
    box = next;
  }

  res.objective = best_value;
  return res;
}

}  // namespace mcroute
