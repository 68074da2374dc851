#ifndef MCROUTE_INSTANCE_IO_HPP
#define MCROUTE_INSTANCE_IO_HPP

#include <optional>
#include <string>
#include <vector>

#include "mcroute/model.hpp"

namespace mcroute {

// Mirror of the on-disk instance JSON. Kept separate from Instance so that
// writing back out preserves exactly the fields the file used (rates given
// as traffic classes stay traffic classes).
struct InstanceFile {
  int schema_version = 1;
  int m = 0;
  int n = 0;
  std::optional<std::vector<double>> lambda;
  std::optional<std::vector<std::vector<int>>> class_assignment;
  std::vector<std::vector<double>> mu_access;  // m rows of n capacities
  std::vector<double> mu_node;
  std::optional<double> eps;  // absent: 1e-6 * smallest capacity
  std::optional<std::vector<std::string>> labels;
};

// Parses and shape-checks the JSON; unknown fields are rejected. Exactly one
// of lambda / class_assignment must be present.
InstanceFile load_instance_file(const std::string& path);

// Validated model instance; class assignments are converted to rates here.
Instance to_instance(const InstanceFile& file);

Instance load_instance(const std::string& path);

void write_instance(const InstanceFile& file, const std::string& path);

// Routing files: JSON {"m": .., "n": .., "values": [[..], ..]}.
RoutingMatrix load_routing(const std::string& path);
void write_routing(const RoutingMatrix& r, const std::string& path);

}  // namespace mcroute

#endif  // MCROUTE_INSTANCE_IO_HPP
