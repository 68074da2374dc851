#ifndef MCROUTE_TRACE_HPP
#define MCROUTE_TRACE_HPP

#include <vector>

namespace mcroute {

// One iteration record. `prices` and `alpha` are filled by the distributed
// solver and left empty by the centralized one.
struct TraceRow {
  int iter = 0;
  double objective = 0.0;
  double step_norm = 0.0;
  std::vector<double> loads;       // aggregate load per node
  std::vector<double> prices;      // per node, distributed runs only
  std::vector<double> mean_delay;  // flow-weighted mean delay per source
  std::vector<double> alpha;       // per-source dual, distributed runs only
};

using Trace = std::vector<TraceRow>;

}  // namespace mcroute

#endif  // MCROUTE_TRACE_HPP
