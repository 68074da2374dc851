#include "mcroute/csv.hpp"

#include <charconv>
#include <fstream>
#include <string>

#include "mcroute/errors.hpp"

namespace mcroute {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open for writing");
  return out;
}

}  // namespace

void write_trace_csv(const std::string& path, const Trace& trace,
                     const Instance& inst, bool with_prices) {
  auto out = open_csv(path);
  out << "iter,objective,step_norm";
  for (int j = 0; j < inst.n; ++j) out << ",util_" << (j + 1);
  if (with_prices)
    for (int j = 0; j < inst.n; ++j) out << ",price_" << (j + 1);
  for (int i = 0; i < inst.m; ++i) out << ",delay_src_" << (i + 1);
  out << "\n";

  for (const auto& row : trace) {
    out << row.iter << ',' << format_number(row.objective) << ','
        << format_number(row.step_norm);
    for (int j = 0; j < inst.n; ++j)
      out << ',' << format_number(row.loads[j] / inst.node_cap(j));
    if (with_prices)
      for (int j = 0; j < inst.n; ++j)
        out << ',' << format_number(row.prices[j]);
    for (int i = 0; i < inst.m; ++i)
      out << ',' << format_number(row.mean_delay[i]);
    out << "\n";
  }
  if (!out) throw ParseError(path + ": write failed");
}

void write_sim_series_csv(const std::string& path, const SimReport& rep) {
  auto out = open_csv(path);
  out << "time,node,ewma_util,queue_len\n";
  const int n = static_cast<int>(rep.node_util_series.size());
  for (size_t k = 0; k < rep.sample_times.size(); ++k)
    for (int j = 0; j < n; ++j)
      out << format_number(rep.sample_times[k]) << ',' << (j + 1) << ','
          << format_number(rep.node_util_series[j][k]) << ','
          << static_cast<long long>(rep.node_queue_series[j][k]) << "\n";
  if (!out) throw ParseError(path + ": write failed");
}

void write_sim_node_summary_csv(const std::string& path, const Instance& inst,
                                const SimReport& rep,
                                const RoutingMatrix& r_det) {
  auto out = open_csv(path);
  out << "node,util_timeavg,util_det\n";
  const auto loads = aggregate_loads(r_det);
  for (int j = 0; j < inst.n; ++j)
    out << (j + 1) << ',' << format_number(rep.node_util_timeavg[j]) << ','
        << format_number(loads[j] / inst.node_cap(j)) << "\n";
  if (!out) throw ParseError(path + ": write failed");
}

void write_sim_split_csv(const std::string& path, const Instance& inst,
                         const SimReport& rep, const RoutingMatrix& r_det) {
  auto out = open_csv(path);
  out << "source,node,split_emp,split_det\n";
  for (int i = 0; i < inst.m; ++i)
    for (int j = 0; j < inst.n; ++j)
      out << (i + 1) << ',' << (j + 1) << ','
          << format_number(rep.empirical_split(i, j)) << ','
          << format_number(r_det(i, j) / inst.lambda[i]) << "\n";
  if (!out) throw ParseError(path + ": write failed");
}

}  // namespace mcroute
