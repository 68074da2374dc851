#ifndef MCROUTE_CSV_HPP
#define MCROUTE_CSV_HPP

#include <string>

#include "mcroute/model.hpp"
#include "mcroute/sim.hpp"
#include "mcroute/trace.hpp"

namespace mcroute {

// Shortest decimal form that parses back to the same double. Deterministic,
// locale-independent.
std::string format_number(double v);

// Header: iter,objective,step_norm,util_1..util_n[,price_1..price_n],
// delay_src_1..delay_src_m. Price columns appear only for traces that carry
// prices (distributed runs).
void write_trace_csv(const std::string& path, const Trace& trace,
                     const Instance& inst, bool with_prices);

// Header: time,node,ewma_util,queue_len; one row per (sample, node).
void write_sim_series_csv(const std::string& path, const SimReport& rep);

// Header: node,util_timeavg,util_det.
void write_sim_node_summary_csv(const std::string& path, const Instance& inst,
                                const SimReport& rep,
                                const RoutingMatrix& r_det);

// Header: source,node,split_emp,split_det.
void write_sim_split_csv(const std::string& path, const Instance& inst,
                         const SimReport& rep, const RoutingMatrix& r_det);

}  // namespace mcroute

#endif  // MCROUTE_CSV_HPP
