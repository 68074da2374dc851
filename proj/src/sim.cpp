#include "mcroute/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <string>
#include <vector>

#include "mcroute/errors.hpp"
#include "mcroute/rng.hpp"

namespace mcroute {

SimConfig resolve_sim_defaults(const Instance& inst, const SimConfig& cfg) {
  SimConfig out = cfg;
  if (out.warmup < 0.0) out.warmup = 0.1 * out.horizon;
  if (out.sample_interval <= 0.0) {
    double min_mu = inst.node_fn(0).capacity();
    for (int j = 1; j < inst.n; ++j)
      min_mu = std::min(min_mu, inst.node_fn(j).capacity());
    out.sample_interval = 100.0 / min_mu;
  }
  return out;
}

std::vector<double> ewma(const std::vector<double>& series, double weight) {
  if (series.empty()) throw ValidationError("ewma of an empty series");
  if (!(weight > 0.0 && weight < 1.0))
    throw ValidationError("ewma weight must be in (0,1), got " +
                          std::to_string(weight));
  std::vector<double> out(series.size());
  out[0] = series[0];
  for (size_t k = 1; k < series.size(); ++k)
    out[k] = (1.0 - weight) * out[k - 1] + weight * series[k];
  return out;
}

namespace {

// RNG stream tags; distinct per (kind, index) so adding queues or nodes
// never perturbs another stream's draws.
enum StreamKind : uint64_t {
  kArrival = 1,
  kRouting = 2,
  kPathService = 3,
  kNodeService = 4,
};

struct Message {
  double emitted = 0.0;
  int source = 0;
};

struct Event {
  double time = 0.0;
  uint64_t seq = 0;
  int kind = 0;  // 0 arrival, 1 path departure, 2 node departure
  int a = 0;     // source or node id
  int b = 0;     // node id for path departures
};

struct EventAfter {
  bool operator()(const Event& x, const Event& y) const {
    if (x.time != y.time) return x.time > y.time;
    return x.seq > y.seq;
  }
};

// Accumulates server busy time, split at sample-window boundaries and
// clipped to the averaging span.
struct BusyClock {
  bool busy = false;
  double busy_start = 0.0;
  double window_accum = 0.0;
  double avg_accum = 0.0;
  double avg_lo = 0.0, avg_hi = 0.0;

  void set_busy(double t, bool b) {
    if (busy == b) return;
    if (b) {
      busy_start = t;
    } else {
      window_accum += t - busy_start;
      avg_accum += overlap(busy_start, t);
    }
    busy = b;
  }

  // Ends the current sample window at time t; returns busy time inside it.
  double close_window(double t) {
    if (busy) {
      window_accum += t - busy_start;
      avg_accum += overlap(busy_start, t);
      busy_start = t;
    }
    const double w = window_accum;
    window_accum = 0.0;
    return w;
  }

  double overlap(double a, double b) const {
    const double lo = std::max(a, avg_lo);
    const double hi = std::min(b, avg_hi);
    return std::max(0.0, hi - lo);
  }
};

}  // namespace

SimReport simulate(const Instance& inst, const RoutingMatrix& r,
                   const SimConfig& cfg_in) {
  const SimConfig cfg = resolve_sim_defaults(inst, cfg_in);
  if (!(cfg.horizon > cfg.warmup && cfg.warmup >= 0.0))
    throw ValidationError("sim horizon must exceed warmup >= 0");
  if (!(cfg.ewma_weight > 0.0 && cfg.ewma_weight < 1.0))
    throw ValidationError("ewma_weight must be in (0,1)");

  const auto feas = check_feasible(inst, r);
  if (!feas.pass)
    throw UnstableRouting(
        "routing is not strictly feasible; some queue has no stability "
        "margin");

  const int m = inst.m;
  const int n = inst.n;

  std::vector<RandomStream> arrival_rng, routing_rng, node_rng;
  std::vector<std::vector<RandomStream>> path_rng;
  arrival_rng.reserve(m);
  routing_rng.reserve(m);
  for (int i = 0; i < m; ++i) {
    arrival_rng.emplace_back(derive_stream_seed(cfg.seed, kArrival, i));
    routing_rng.emplace_back(derive_stream_seed(cfg.seed, kRouting, i));
  }
  path_rng.resize(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      path_rng[i].emplace_back(derive_stream_seed(cfg.seed, kPathService, i, j));
  node_rng.reserve(n);
  for (int j = 0; j < n; ++j)
    node_rng.emplace_back(derive_stream_seed(cfg.seed, kNodeService, j));

  std::vector<std::deque<Message>> path_q(static_cast<size_t>(m) * n);
  std::vector<std::deque<Message>> node_q(n);
  std::vector<BusyClock> node_busy(n);
  for (auto& b : node_busy) {
    b.avg_lo = cfg.warmup;
    b.avg_hi = cfg.horizon;
  }

  SimReport rep;
  rep.empirical_split = Matrix(m, n);
  rep.split_counts = Matrix(m, n);
  rep.path_arrivals = Matrix(m, n);
  rep.path_departures = Matrix(m, n);
  rep.path_in_system = Matrix(m, n);
  rep.source_messages.assign(m, 0.0);
  rep.completed.assign(m, 0.0);
  rep.node_arrivals.assign(n, 0.0);
  rep.node_departures.assign(n, 0.0);
  rep.node_in_system.assign(n, 0.0);
  rep.node_util_series.resize(n);
  rep.node_queue_series.resize(n);
  std::vector<double> sojourn_sum(m, 0.0);

  std::priority_queue<Event, std::vector<Event>, EventAfter> heap;
  uint64_t seq = 0;
  auto push = [&](double t, int kind, int a, int b = 0) {
    heap.push(Event{t, seq++, kind, a, b});
  };

  for (int i = 0; i < m; ++i) {
    const double t = arrival_rng[i].exponential(inst.lambda[i]);
    if (t <= cfg.horizon) push(t, 0, i);
  }

  long long next_sample = 1;
  auto flush_samples_through = [&](double t) {
    while (true) {
      const double ts = next_sample * cfg.sample_interval;
      if (ts > t || ts > cfg.horizon) break;
      rep.sample_times.push_back(ts);
      for (int j = 0; j < n; ++j) {
        const double busy = node_busy[j].close_window(ts);
        rep.node_util_series[j].push_back(busy / cfg.sample_interval);
        rep.node_queue_series[j].push_back(
            static_cast<double>(node_q[j].size()));
      }
      ++next_sample;
    }
  };

  while (!heap.empty()) {
    const Event ev = heap.top();
    if (ev.time > cfg.horizon) break;
    heap.pop();
    flush_samples_through(ev.time);

    switch (ev.kind) {
      case 0: {  // source ev.a emits a message
        const int i = ev.a;
        rep.source_messages[i] += 1.0;

        const double u = routing_rng[i].uniform01();
        double acc = 0.0;
        int dest = -1;
        for (int j = 0; j < n; ++j) {
          const double frac = r(i, j) / inst.lambda[i];
          if (frac <= 0.0) continue;
          acc += frac;
          dest = j;
          if (u < acc) break;
        }

        if (ev.time >= cfg.warmup) rep.split_counts(i, dest) += 1.0;
        rep.path_arrivals(i, dest) += 1.0;
        auto& q = path_q[static_cast<size_t>(i) * n + dest];
        q.push_back(Message{ev.time, i});
        if (q.size() == 1)
          push(ev.time + path_rng[i][dest].exponential(
                             inst.access_fn(i, dest).capacity()),
               1, i, dest);

        const double next = ev.time + arrival_rng[i].exponential(inst.lambda[i]);
        if (next <= cfg.horizon) push(next, 0, i);
        break;
      }
      case 1: {  // path (ev.a, ev.b) finishes an access service
        const int i = ev.a;
        const int j = ev.b;
        auto& q = path_q[static_cast<size_t>(i) * n + j];
        const Message msg = q.front();
        q.pop_front();
        rep.path_departures(i, j) += 1.0;
        if (!q.empty())
          push(ev.time + path_rng[i][j].exponential(
                             inst.access_fn(i, j).capacity()),
               1, i, j);

        rep.node_arrivals[j] += 1.0;
        node_q[j].push_back(msg);
        if (node_q[j].size() == 1) {
          node_busy[j].set_busy(ev.time, true);
          push(ev.time + node_rng[j].exponential(inst.node_fn(j).capacity()),
               2, j);
        }
        break;
      }
      case 2: {  // node ev.a finishes a service
        const int j = ev.a;
        const Message msg = node_q[j].front();
        node_q[j].pop_front();
        rep.node_departures[j] += 1.0;
        if (!node_q[j].empty()) {
          push(ev.time + node_rng[j].exponential(inst.node_fn(j).capacity()),
               2, j);
        } else {
          node_busy[j].set_busy(ev.time, false);
        }
        if (msg.emitted >= cfg.warmup) {
          rep.completed[msg.source] += 1.0;
          sojourn_sum[msg.source] += ev.time - msg.emitted;
        }
        break;
      }
    }
  }
  flush_samples_through(cfg.horizon);

  for (int j = 0; j < n; ++j) {
    node_busy[j].close_window(cfg.horizon);
    rep.node_util_timeavg.push_back(node_busy[j].avg_accum /
                                    (cfg.horizon - cfg.warmup));
    rep.node_util_series[j] = ewma(rep.node_util_series[j], cfg.ewma_weight);
    rep.node_in_system[j] = static_cast<double>(node_q[j].size());
  }

  rep.persource_mean_delay.assign(m, 0.0);
  for (int i = 0; i < m; ++i) {
    if (rep.completed[i] > 0.0)
      rep.persource_mean_delay[i] = sojourn_sum[i] / rep.completed[i];
    double row_total = 0.0;
    for (int j = 0; j < n; ++j) row_total += rep.split_counts(i, j);
    for (int j = 0; j < n; ++j)
      rep.empirical_split(i, j) = row_total > 0.0
                                      ? rep.split_counts(i, j) / row_total
                                      : r(i, j) / inst.lambda[i];
    for (int j = 0; j < n; ++j)
      rep.path_in_system(i, j) =
          static_cast<double>(path_q[static_cast<size_t>(i) * n + j].size());
  }
  return rep;
}

std::vector<SimReport> simulate_replications(
    const Instance& inst, const RoutingMatrix& r, const SimConfig& cfg,
    const std::vector<std::uint64_t>& seeds, Exec exec) {
  std::vector<SimReport> out(seeds.size());
  // Validate once up front; a throw from inside the parallel loop would not
  // propagate.
  if (!check_feasible(inst, r).pass)
    throw UnstableRouting(
        "routing is not strictly feasible; some queue has no stability "
        "margin");
#ifdef _OPENMP
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (size_t k = 0; k < seeds.size(); ++k) {
      SimConfig c = cfg;
      c.seed = seeds[k];
      out[k] = simulate(inst, r, c);
    }
    return out;
  }
#else
  (void)exec;
#endif
  for (size_t k = 0; k < seeds.size(); ++k) {
    SimConfig c = cfg;
    c.seed = seeds[k];
    out[k] = simulate(inst, r, c);
  }
  return out;
}

}  // namespace mcroute
