#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcroute/central.hpp"
#include "mcroute/csv.hpp"
#include "mcroute/dist.hpp"
#include "mcroute/errors.hpp"
#include "mcroute/instance_io.hpp"
#include "mcroute/oracle.hpp"
#include "mcroute/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mcroute;

namespace {

constexpr const char* kVersion = "1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitNotConverged = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIoError = 4;

std::string hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

// Common run context: parsed flags, resolved output directory, manifest
// accumulation. The manifest holds everything needed to reproduce the run
// bit-exactly: tool version, subcommand, config values, seed, and the
// instance file's content hash. Deliberately no timestamps.
struct RunContext {
  std::string subcommand;
  std::string instance_path;
  std::string out_dir;
  json config = json::object();
  std::vector<std::string> outputs;

  fs::path out(const std::string& name) {
    outputs.push_back(name);
    return fs::path(out_dir) / name;
  }

  void write_manifest() {
    json root;
    root["tool"] = "mcroute";
    root["version"] = kVersion;
    root["subcommand"] = subcommand;
    root["instance"] = instance_path;
    root["instance_hash_fnv1a64"] = hash_file(instance_path);
    root["config"] = config;
    root["outputs"] = outputs;
    const fs::path p = fs::path(out_dir) / "manifest.json";
    std::ofstream f(p);
    if (!f) throw ParseError(p.string() + ": cannot open for writing");
    f << root.dump(2) << "\n";
  }
};

void prepare_out_dir(RunContext& ctx) {
  std::error_code ec;
  fs::create_directories(ctx.out_dir, ec);
  if (ec)
    throw ParseError(ctx.out_dir + ": cannot create directory: " +
                     ec.message());
}

std::string verdict(bool pass) { return pass ? "pass" : "fail"; }

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw ParseError(p.string() + ": cannot open for writing");
  f << text;
  if (!f) throw ParseError(p.string() + ": write failed");
}

std::string central_summary(const Instance& inst, const CentralResult& res) {
  std::string s;
  s += "solver: central projected gradient\n";
  s += "converged: " + std::string(res.converged ? "true" : "false") + "\n";
  s += "iterations: " + std::to_string(res.iters) + "\n";
  s += "objective: " + format_number(res.objective) + "\n";
  s += "wardrop_spread_max: " + format_number(res.spread) + "\n";
  s += "wardrop_slack_min: " + format_number(res.slack) + "\n";
  s += "step_residual: " + format_number(res.step_residual) + "\n";
  s += "wardrop_verdict: " + verdict(res.report.pass) + "\n";
  const auto loads = aggregate_loads(res.routing);
  for (int j = 0; j < inst.n; ++j)
    s += "util_node_" + std::to_string(j + 1) + ": " +
         format_number(loads[j] / inst.node_cap(j)) + "\n";
  return s;
}

int cmd_solve_central(RunContext& ctx, double tol, int max_iters) {
  const Instance inst = load_instance(ctx.instance_path);
  CentralConfig cfg;
  cfg.grad_tol = tol;
  cfg.max_iters = max_iters;
  ctx.config = {{"tol", tol}, {"max_iters", max_iters}};

  const CentralResult res = solve_central(inst, cfg);
  prepare_out_dir(ctx);
  write_trace_csv(ctx.out("trace_central.csv"), res.trace, inst, false);
  write_routing(res.routing, ctx.out("routing_central.json"));
  write_text(ctx.out("summary.txt"), central_summary(inst, res));
  ctx.write_manifest();
  return res.converged ? kExitOk : kExitNotConverged;
}

int cmd_solve_dist(RunContext& ctx, double tol, int max_iters, double eta,
                   double gamma) {
  const Instance inst = load_instance(ctx.instance_path);
  DistConfig cfg;
  cfg.rel_tol = tol;
  cfg.max_iters = max_iters;
  cfg.eta = eta;
  cfg.gamma = gamma;
  ctx.config = {{"tol", tol},
                {"max_iters", max_iters},
                {"eta", eta},
                {"gamma", gamma}};

  const DistResult res = run_distributed(inst, cfg);
  prepare_out_dir(ctx);
  write_trace_csv(ctx.out("trace_dist.csv"), res.trace, inst, true);
  write_routing(res.routing, ctx.out("routing_dist.json"));

  const auto wr = wardrop_report(inst, res.routing, 1e-8, 1e-4);
  std::string s;
  s += "solver: distributed pricing iteration\n";
  s += "converged: " + std::string(res.converged ? "true" : "false") + "\n";
  s += "iterations: " + std::to_string(res.iters) + "\n";
  s += "objective: " + format_number(objective_clamped(inst, res.routing)) +
       "\n";
  s += "fixed_point_residual: " + format_number(res.fixed_point_residual) +
       "\n";
  s += "wardrop_verdict_at_1e-4: " + verdict(wr.pass) + "\n";
  const auto loads = aggregate_loads(res.routing);
  for (int j = 0; j < inst.n; ++j) {
    s += "util_node_" + std::to_string(j + 1) + ": " +
         format_number(loads[j] / inst.node_cap(j)) + "\n";
    s += "price_node_" + std::to_string(j + 1) + ": " +
         format_number(res.prices[j]) + "\n";
  }
  write_text(ctx.out("summary.txt"), s);
  ctx.write_manifest();
  return res.converged ? kExitOk : kExitNotConverged;
}

int cmd_compare(RunContext& ctx, double tol, int max_iters, double eta,
                double gamma) {
  const Instance inst = load_instance(ctx.instance_path);
  CentralConfig ccfg;
  ccfg.grad_tol = tol;
  DistConfig dcfg;
  dcfg.rel_tol = tol;
  dcfg.max_iters = max_iters;
  dcfg.eta = eta;
  dcfg.gamma = gamma;
  ctx.config = {{"tol", tol},
                {"max_iters", max_iters},
                {"eta", eta},
                {"gamma", gamma}};

  const CentralResult cres = solve_central(inst, ccfg);
  const DistResult dres = run_distributed(inst, dcfg);
  prepare_out_dir(ctx);
  write_trace_csv(ctx.out("trace_central.csv"), cres.trace, inst, false);
  write_trace_csv(ctx.out("trace_dist.csv"), dres.trace, inst, true);
  write_routing(cres.routing, ctx.out("routing_central.json"));
  write_routing(dres.routing, ctx.out("routing_dist.json"));

  const double f_central = cres.objective;
  const double f_dist = objective_or_inf(inst, dres.routing);
  const double gap_abs = f_dist - f_central;
  const double gap_rel = gap_abs / f_central;
  const double max_diff = max_abs_diff(cres.routing, dres.routing);
  const auto wc = wardrop_report(inst, cres.routing, 1e-8, 1e-4);
  const auto wd = wardrop_report(inst, dres.routing, 1e-8, 1e-4);

  const auto cl = aggregate_loads(cres.routing);
  const auto dl = aggregate_loads(dres.routing);
  std::string csv = "node,util_central,util_dist\n";
  for (int j = 0; j < inst.n; ++j)
    csv += std::to_string(j + 1) + "," +
           format_number(cl[j] / inst.node_cap(j)) + "," +
           format_number(dl[j] / inst.node_cap(j)) + "\n";
  write_text(ctx.out("compare_utils.csv"), csv);

  std::string s;
  s += "objective_central: " + format_number(f_central) + "\n";
  s += "objective_dist: " + format_number(f_dist) + "\n";
  s += "gap_abs: " + format_number(gap_abs) + "\n";
  s += "gap_rel: " + format_number(gap_rel) + "\n";
  s += "max_abs_routing_diff: " + format_number(max_diff) + "\n";
  s += "central_converged: " + std::string(cres.converged ? "true" : "false") +
       "\n";
  s += "dist_converged: " + std::string(dres.converged ? "true" : "false") +
       "\n";
  s += "wardrop_central: " + verdict(wc.pass) + "\n";
  s += "wardrop_dist: " + verdict(wd.pass) + "\n";
  write_text(ctx.out("summary.txt"), s);
  ctx.write_manifest();
  return (cres.converged && dres.converged) ? kExitOk : kExitNotConverged;
}

int cmd_check_kkt(RunContext& ctx, const std::string& routing_path,
                  double tol) {
  const Instance inst = load_instance(ctx.instance_path);
  const RoutingMatrix r = load_routing(routing_path);
  ctx.config = {{"routing", routing_path}, {"tol", tol}};

  const auto rep = wardrop_report(inst, r, 1e-8, tol);
  prepare_out_dir(ctx);
  std::string s;
  s += "wardrop_verdict: " + verdict(rep.pass) + "\n";
  s += "tol: " + format_number(tol) + "\n";
  for (int i = 0; i < inst.m; ++i) {
    s += "source_" + std::to_string(i + 1) +
         ": alpha=" + format_number(rep.alpha[i]) +
         " spread=" + format_number(rep.spread[i]) +
         " slack=" + format_number(rep.slack[i]) +
         (rep.degenerate[i] ? " degenerate" : "") + "\n";
  }
  for (int j = 0; j < inst.n; ++j)
    if (rep.node_bound_active[j])
      s += "node_" + std::to_string(j + 1) + ": capacity bound active\n";
  write_text(ctx.out("check_kkt.txt"), s);
  ctx.write_manifest();
  return rep.pass ? kExitOk : kExitNotConverged;
}

int cmd_simulate(RunContext& ctx, const std::string& routing_path, double tol,
                 int max_iters, double eta, double gamma, std::uint64_t seed,
                 double horizon) {
  const Instance inst = load_instance(ctx.instance_path);

  RoutingMatrix r;
  bool dist_converged = true;
  if (!routing_path.empty()) {
    r = load_routing(routing_path);
  } else {
    DistConfig dcfg;
    dcfg.rel_tol = tol;
    dcfg.max_iters = max_iters;
    dcfg.eta = eta;
    dcfg.gamma = gamma;
    const DistResult dres = run_distributed(inst, dcfg);
    r = dres.routing;
    dist_converged = dres.converged;
  }
  ctx.config = {{"routing", routing_path.empty() ? json() : json(routing_path)},
                {"tol", tol},
                {"max_iters", max_iters},
                {"eta", eta},
                {"gamma", gamma},
                {"seed", seed},
                {"horizon", horizon}};

  SimConfig scfg;
  scfg.seed = seed;
  scfg.horizon = horizon;
  const SimConfig resolved = resolve_sim_defaults(inst, scfg);
  const SimReport rep = simulate(inst, r, resolved);

  prepare_out_dir(ctx);
  write_routing(r, ctx.out("routing_simulated.json"));
  write_sim_series_csv(ctx.out("sim_series.csv"), rep);
  write_sim_node_summary_csv(ctx.out("sim_nodes.csv"), inst, rep, r);
  write_sim_split_csv(ctx.out("sim_split.csv"), inst, rep, r);

  const auto loads = aggregate_loads(r);
  const auto det_delay = per_source_mean_delay(inst, r);
  std::string s;
  s += "horizon: " + format_number(resolved.horizon) + "\n";
  s += "warmup: " + format_number(resolved.warmup) + "\n";
  s += "sample_interval: " + format_number(resolved.sample_interval) + "\n";
  s += "seed: " + std::to_string(seed) + "\n";
  if (routing_path.empty())
    s += "routing: distributed fixed point (converged: " +
         std::string(dist_converged ? "true" : "false") + ")\n";
  else
    s += "routing: " + routing_path + "\n";
  for (int j = 0; j < inst.n; ++j)
    s += "node_" + std::to_string(j + 1) +
         ": util_sim=" + format_number(rep.node_util_timeavg[j]) +
         " util_det=" + format_number(loads[j] / inst.node_cap(j)) + "\n";
  for (int i = 0; i < inst.m; ++i)
    s += "source_" + std::to_string(i + 1) +
         ": delay_sim=" + format_number(rep.persource_mean_delay[i]) +
         " delay_det=" + format_number(det_delay[i]) +
         " messages=" + format_number(rep.source_messages[i]) + "\n";
  write_text(ctx.out("summary.txt"), s);
  ctx.write_manifest();
  return dist_converged ? kExitOk : kExitNotConverged;
}

int cmd_oracle(RunContext& ctx, int grid_points, int refine_rounds) {
  const Instance inst = load_instance(ctx.instance_path);
  OracleConfig cfg;
  cfg.grid_points = grid_points;
  cfg.refine_rounds = refine_rounds;
  ctx.config = {{"grid_points", grid_points},
                {"refine_rounds", refine_rounds},
                {"shrink", cfg.shrink}};

  const OracleResult res = brute_force_optimum(inst, cfg);
  prepare_out_dir(ctx);
  write_routing(res.routing, ctx.out("routing_oracle.json"));
  std::string s;
  s += "objective: " + format_number(res.objective) + "\n";
  s += "evaluations: " + std::to_string(res.evaluations) + "\n";
  write_text(ctx.out("summary.txt"), s);
  ctx.write_manifest();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multipath routing over shared service nodes: solvers, "
               "KKT checks, brute-force oracle, and M/M/1 validation"};
  app.require_subcommand(1);

  std::string instance_path, out_dir = "out", routing_path;
  double tol = 1e-7, eta = 0.3, gamma = 0.5, horizon = 1e5;
  int max_iters = 0;  // resolved per subcommand after parsing
  std::uint64_t seed = 1;
  int grid_points = 101, refine_rounds = 3;

  auto add_shared = [&](CLI::App* cmd, const std::string& max_iters_default) {
    cmd->add_option("--instance", instance_path, "instance JSON file")
        ->required();
    cmd->add_option("--out-dir", out_dir, "output directory")
        ->capture_default_str();
    cmd->add_option("--tol", tol, "convergence tolerance")
        ->capture_default_str();
    cmd->add_option("--max-iters", max_iters,
                    "iteration cap (default: " + max_iters_default + ")");
    cmd->add_option("--eta", eta, "source damping step")
        ->capture_default_str();
    cmd->add_option("--gamma", gamma, "price damping step")
        ->capture_default_str();
    cmd->add_option("--seed", seed, "simulation seed")->capture_default_str();
    cmd->add_option("--horizon", horizon, "simulated seconds")
        ->capture_default_str();
  };
  auto resolved_max_iters = [&](CLI::App* cmd, int fallback) {
    return cmd->count("--max-iters") > 0 ? max_iters : fallback;
  };

  CLI::App* c_central = app.add_subcommand(
      "solve-central", "centralized projected-gradient optimum");
  add_shared(c_central, "5000");

  CLI::App* c_dist =
      app.add_subcommand("solve-dist", "distributed pricing iteration");
  add_shared(c_dist, "400");

  CLI::App* c_compare =
      app.add_subcommand("compare", "run both solvers and report the gap");
  add_shared(c_compare, "400");

  CLI::App* c_kkt = app.add_subcommand(
      "check-kkt", "Wardrop/KKT report for a provided routing");
  add_shared(c_kkt, "400");
  c_kkt->add_option("--routing", routing_path, "routing JSON file")
      ->required();
  double kkt_tol = 1e-4;
  c_kkt->add_option("--kkt-tol", kkt_tol,
                    "marginal-cost equalization tolerance")
      ->capture_default_str();

  CLI::App* c_sim = app.add_subcommand(
      "simulate", "discrete-event validation of an operating point");
  add_shared(c_sim, "400");
  c_sim->add_option("--routing", routing_path,
                    "routing JSON file (default: distributed fixed point)");

  CLI::App* c_oracle =
      app.add_subcommand("oracle", "brute-force optimum for tiny instances");
  add_shared(c_oracle, "400");
  c_oracle->add_option("--grid-points", grid_points,
                       "grid points per free dimension")
      ->capture_default_str();
  c_oracle->add_option("--refine-rounds", refine_rounds,
                       "zoom-in passes around the incumbent")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitIoError;
  }

  RunContext ctx;
  ctx.instance_path = instance_path;
  ctx.out_dir = out_dir;

  try {
    if (app.got_subcommand(c_central)) {
      ctx.subcommand = "solve-central";
      return cmd_solve_central(ctx, tol, resolved_max_iters(c_central, 5000));
    }
    if (app.got_subcommand(c_dist)) {
      ctx.subcommand = "solve-dist";
      return cmd_solve_dist(ctx, tol, resolved_max_iters(c_dist, 400), eta,
                            gamma);
    }
    if (app.got_subcommand(c_compare)) {
      ctx.subcommand = "compare";
      return cmd_compare(ctx, tol, resolved_max_iters(c_compare, 400), eta,
                         gamma);
    }
    if (app.got_subcommand(c_kkt)) {
      ctx.subcommand = "check-kkt";
      return cmd_check_kkt(ctx, routing_path, kkt_tol);
    }
    if (app.got_subcommand(c_sim)) {
      ctx.subcommand = "simulate";
      return cmd_simulate(ctx, routing_path, tol,
                          resolved_max_iters(c_sim, 400), eta, gamma, seed,
                          horizon);
    }
    if (app.got_subcommand(c_oracle)) {
      ctx.subcommand = "oracle";
      return cmd_oracle(ctx, grid_points, refine_rounds);
    }
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const BestResponseInfeasible& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const UnstableRouting& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  }
  return kExitIoError;
}
