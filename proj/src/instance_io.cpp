#include "mcroute/instance_io.hpp"

#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "mcroute/errors.hpp"

namespace mcroute {

namespace {

using nlohmann::json;

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ParseError(path + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& path) {
  if (!obj.is_object()) throw ParseError(path + ": top level must be an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key))
      throw ParseError(path + ": unknown field \"" + key + "\"");
  }
}

template <typename T>
T field_as(const json& obj, const std::string& key, const std::string& path) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(path + ": field \"" + key + "\": " + e.what());
  }
}

}  // namespace

InstanceFile load_instance_file(const std::string& path) {
  const json root = parse_file(path);
  require_keys(root,
               {"schema_version", "m", "n", "lambda", "class_assignment",
                "mu_access", "mu_node", "eps", "labels"},
               path);

  InstanceFile f;
  f.schema_version = field_as<int>(root, "schema_version", path);
  if (f.schema_version != 1)
    throw ParseError(path + ": unsupported schema_version " +
                     std::to_string(f.schema_version));
  f.m = field_as<int>(root, "m", path);
  f.n = field_as<int>(root, "n", path);
  if (f.m <= 0 || f.n <= 0)
    throw ParseError(path + ": m and n must be positive");

  const bool has_lambda = root.contains("lambda");
  const bool has_classes = root.contains("class_assignment");
  if (has_lambda == has_classes)
    throw ParseError(path +
                     ": exactly one of \"lambda\" and \"class_assignment\" "
                     "must be present");
  if (has_lambda) {
    f.lambda = field_as<std::vector<double>>(root, "lambda", path);
    if (static_cast<int>(f.lambda->size()) != f.m)
      throw ParseError(path + ": lambda must have m entries");
  } else {
    f.class_assignment =
        field_as<std::vector<std::vector<int>>>(root, "class_assignment", path);
    if (static_cast<int>(f.class_assignment->size()) != f.m)
      throw ParseError(path + ": class_assignment must have m entries");
  }

  f.mu_access =
      field_as<std::vector<std::vector<double>>>(root, "mu_access", path);
  if (static_cast<int>(f.mu_access.size()) != f.m)
    throw ParseError(path + ": mu_access must have m rows");
  for (const auto& row : f.mu_access)
    if (static_cast<int>(row.size()) != f.n)
      throw ParseError(path + ": every mu_access row must have n entries");

  f.mu_node = field_as<std::vector<double>>(root, "mu_node", path);
  if (static_cast<int>(f.mu_node.size()) != f.n)
    throw ParseError(path + ": mu_node must have n entries");

  if (root.contains("eps")) f.eps = field_as<double>(root, "eps", path);
  if (root.contains("labels"))
    f.labels = field_as<std::vector<std::string>>(root, "labels", path);
  return f;
}

Instance to_instance(const InstanceFile& f) {
  std::vector<double> lambda;
  if (f.lambda) {
    lambda = *f.lambda;
  } else {
    lambda.reserve(f.m);
    for (const auto& classes : *f.class_assignment)
      lambda.push_back(traffic_class_rates(classes));
  }

  Matrix mu_access(f.m, f.n);
  std::vector<double> flat;
  flat.reserve(static_cast<size_t>(f.m) * f.n);
  for (int i = 0; i < f.m; ++i)
    for (int j = 0; j < f.n; ++j) {
      mu_access(i, j) = f.mu_access[i][j];
      flat.push_back(f.mu_access[i][j]);
    }

  const double eps =
      f.eps ? *f.eps : Instance::default_eps(flat, f.mu_node);
  return make_mm1_instance(std::move(lambda), mu_access, f.mu_node, eps);
}

Instance load_instance(const std::string& path) {
  return to_instance(load_instance_file(path));
}

void write_instance(const InstanceFile& f, const std::string& path) {
  json root;
  root["schema_version"] = f.schema_version;
  root["m"] = f.m;
  root["n"] = f.n;
  if (f.lambda) root["lambda"] = *f.lambda;
  if (f.class_assignment) root["class_assignment"] = *f.class_assignment;
  root["mu_access"] = f.mu_access;
  root["mu_node"] = f.mu_node;
  if (f.eps) root["eps"] = *f.eps;
  if (f.labels) root["labels"] = *f.labels;

  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << root.dump(2) << "\n";
  if (!out) throw ParseError(path + ": write failed");
}

RoutingMatrix load_routing(const std::string& path) {
  const json root = parse_file(path);
  require_keys(root, {"m", "n", "values"}, path);
  const int m = field_as<int>(root, "m", path);
  const int n = field_as<int>(root, "n", path);
  if (m <= 0 || n <= 0) throw ParseError(path + ": m and n must be positive");
  const auto values =
      field_as<std::vector<std::vector<double>>>(root, "values", path);
  if (static_cast<int>(values.size()) != m)
    throw ParseError(path + ": values must have m rows");
  RoutingMatrix r(m, n);
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(values[i].size()) != n)
      throw ParseError(path + ": every values row must have n entries");
    for (int j = 0; j < n; ++j) r(i, j) = values[i][j];
  }
  return r;
}

void write_routing(const RoutingMatrix& r, const std::string& path) {
  json root;
  root["m"] = r.rows;
  root["n"] = r.cols;
  std::vector<std::vector<double>> values(r.rows, std::vector<double>(r.cols));
  for (int i = 0; i < r.rows; ++i)
    for (int j = 0; j < r.cols; ++j) values[i][j] = r(i, j);
  root["values"] = values;

  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << root.dump(2) << "\n";
  if (!out) throw ParseError(path + ": write failed");
}

}  // namespace mcroute
