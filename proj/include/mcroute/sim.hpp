#ifndef MCROUTE_SIM_HPP
#define MCROUTE_SIM_HPP

#include <cstdint>
#include <vector>

#include "mcroute/exec.hpp"
#include "mcroute/model.hpp"

namespace mcroute {

struct SimConfig {
  double horizon = 1e5;       // simulated seconds
  std::uint64_t seed = 1;
  double ewma_weight = 0.05;  // in (0,1)
  double warmup = -1.0;       // seconds excluded from averages; <0 means 10%
                              // of the horizon
  double sample_interval = -1.0;  // seconds between utilization samples;
                                  // <0 means 100/min node capacity
};

// All count fields hold integers; doubles keep them exact up to 2^53 and
// uniform with the rate matrices.
struct SimReport {
  std::vector<double> sample_times;
  std::vector<std::vector<double>> node_util_series;  // [node][sample], EWMA
  std::vector<std::vector<double>> node_queue_series;  // [node][sample]
  std::vector<double> node_util_timeavg;  // busy fraction on [warmup,horizon]
  std::vector<double> persource_mean_delay;  // access + node sojourn
  Matrix empirical_split;  // rows sum to 1
  Matrix split_counts;     // post-warmup routed messages per (i,j)

  std::vector<double> source_messages;  // emitted per source, whole run
  std::vector<double> completed;        // post-warmup completions per source

  Matrix path_arrivals, path_departures, path_in_system;
  std::vector<double> node_arrivals, node_departures, node_in_system;
};

// Filled-in copy of cfg with the documented defaults substituted for the
// negative placeholder values.
SimConfig resolve_sim_defaults(const Instance& inst, const SimConfig& cfg);

// y_0 = x_0; y_k = (1-w)*y_{k-1} + w*x_k.
std::vector<double> ewma(const std::vector<double>& series, double weight);

// Discrete-event validation of an operating point: Poisson sources split
// per-arrival by the routing fractions, exponential FIFO service on the
// access stage and again at the node (the node stage treats its input as
// Poisson at the aggregate rate). Deterministic for a given seed.
SimReport simulate(const Instance& inst, const RoutingMatrix& r,
                   const SimConfig& cfg);

// Independent replications, one per seed, reported in seed order.
std::vector<SimReport> simulate_replications(const Instance& inst,
                                             const RoutingMatrix& r,
                                             const SimConfig& cfg,
                                             const std::vector<std::uint64_t>& seeds,
                                             Exec exec = Exec::parallel);

}  // namespace mcroute

#endif  // MCROUTE_SIM_HPP
