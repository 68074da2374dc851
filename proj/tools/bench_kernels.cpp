// Timing harness for the three parallelizable kernels, checking that the
// OpenMP path reproduces the serial reference bit for bit.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "mcroute/dist.hpp"
#include "mcroute/model.hpp"
#include "mcroute/oracle.hpp"
#include "mcroute/sim.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace mcroute;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         (a.empty() ||
          std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

bool same_bits(const Matrix& a, const Matrix& b) {
  return a.rows == b.rows && a.cols == b.cols && same_bits(a.data, b.data);
}

Instance bench_instance(int m, int n, double util_target) {
  std::vector<double> lambda(m);
  for (int i = 0; i < m; ++i) lambda[i] = 0.8 + 0.4 * ((i * 13) % 11) / 10.0;
  double total = 0.0;
  for (double l : lambda) total += l;

  Matrix mu_access(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      mu_access(i, j) = 2.0 + 0.3 * ((i * 7 + j * 13) % 10);
  std::vector<double> mu_node(n, total / n / util_target);
  return make_mm1_instance(lambda, mu_access, mu_node, 1e-6);
}

struct Row {
  std::string name;
  double serial_ms = 0.0;
  double parallel_ms = 0.0;
  bool identical = false;
};

Row bench_oracle(bool smoke) {
  std::vector<double> lambda = {1.0, 0.8};
  Matrix mu_access(2, 2);
  mu_access(0, 0) = 3.0;
  mu_access(0, 1) = 3.0;
  mu_access(1, 0) = 2.5;
  mu_access(1, 1) = 4.0;
  const Instance inst =
      make_mm1_instance(lambda, mu_access, {2.5, 4.5}, 1e-6);

  OracleConfig cfg;
  cfg.grid_points = smoke ? 51 : 601;
  cfg.refine_rounds = 2;

  Row row{"oracle_sweep_2x2", 0, 0, false};
  cfg.exec = Exec::serial;
  auto t0 = std::chrono::steady_clock::now();
  const OracleResult a = brute_force_optimum(inst, cfg);
  row.serial_ms = ms_since(t0);

  cfg.exec = Exec::parallel;
  t0 = std::chrono::steady_clock::now();
  const OracleResult b = brute_force_optimum(inst, cfg);
  row.parallel_ms = ms_since(t0);

  row.identical = same_bits(a.routing, b.routing) &&
                  a.objective == b.objective &&
                  a.evaluations == b.evaluations;
  return row;
}

Row bench_best_response(bool smoke) {
  const Instance inst = bench_instance(smoke ? 24 : 96, smoke ? 6 : 12, 0.45);

  DistConfig cfg;
  cfg.max_iters = smoke ? 10 : 60;
  cfg.rel_tol = 1e-14;  // keep iterating; the kernel is the point here

  Row row{"best_response_rounds", 0, 0, false};
  cfg.exec = Exec::serial;
  auto t0 = std::chrono::steady_clock::now();
  const DistResult a = run_distributed(inst, cfg);
  row.serial_ms = ms_since(t0);

  cfg.exec = Exec::parallel;
  t0 = std::chrono::steady_clock::now();
  const DistResult b = run_distributed(inst, cfg);
  row.parallel_ms = ms_since(t0);

  bool ok = same_bits(a.routing, b.routing) && same_bits(a.prices, b.prices) &&
            a.iters == b.iters && a.trace.size() == b.trace.size();
  for (size_t k = 0; ok && k < a.trace.size(); ++k)
    ok = a.trace[k].objective == b.trace[k].objective &&
         same_bits(a.trace[k].loads, b.trace[k].loads) &&
         same_bits(a.trace[k].prices, b.trace[k].prices);
  row.identical = ok;
  return row;
}

Row bench_sim_replications(bool smoke) {
  const Instance inst = bench_instance(8, 4, 0.5);
  DistConfig dcfg;
  dcfg.exec = Exec::serial;
  const RoutingMatrix r = run_distributed(inst, dcfg).routing;

  SimConfig cfg;
  cfg.horizon = smoke ? 2e3 : 2e4;
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= (smoke ? 4u : 8u); ++s) seeds.push_back(s);

  Row row{"sim_replications", 0, 0, false};
  auto t0 = std::chrono::steady_clock::now();
  const auto a = simulate_replications(inst, r, cfg, seeds, Exec::serial);
  row.serial_ms = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  const auto b = simulate_replications(inst, r, cfg, seeds, Exec::parallel);
  row.parallel_ms = ms_since(t0);

  bool ok = a.size() == b.size();
  for (size_t k = 0; ok && k < a.size(); ++k)
    ok = same_bits(a[k].node_util_timeavg, b[k].node_util_timeavg) &&
         same_bits(a[k].persource_mean_delay, b[k].persource_mean_delay) &&
         same_bits(a[k].empirical_split, b[k].empirical_split) &&
         same_bits(a[k].sample_times, b[k].sample_times);
  row.identical = ok;
  return row;
}

}  // namespace

int main(int argc, char** argv) {
  bool smoke = false;
  for (int i = 1; i < argc; ++i)
    if (std::string(argv[i]) == "--smoke") smoke = true;

#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("openmp: not enabled (parallel path falls back to serial)\n");
#endif

  std::vector<Row> rows;
  rows.push_back(bench_oracle(smoke));
  rows.push_back(bench_best_response(smoke));
  rows.push_back(bench_sim_replications(smoke));

  std::printf("%-24s %12s %12s %9s %10s\n", "kernel", "serial_ms",
              "parallel_ms", "speedup", "identical");
  bool all_ok = true;
  for (const auto& r : rows) {
    std::printf("%-24s %12.2f %12.2f %9.2f %10s\n", r.name.c_str(),
                r.serial_ms, r.parallel_ms,
                r.parallel_ms > 0 ? r.serial_ms / r.parallel_ms : 0.0,
                r.identical ? "yes" : "NO");
    all_ok = all_ok && r.identical;
  }
  return all_ok ? 0 : 1;
}
