#include "carp/instance.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>

namespace carp {

std::vector<int> Instance::required_edges() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(edges.size()); ++i)
    if (edges[i].required) out.push_back(i);
  return out;
}

Cost Instance::service_cost() const {
  Cost total = 0;
  for (const auto& e : edges)
    if (e.required) total += e.cost;
  return total;
}

Cost Instance::total_demand() const {
  Cost total = 0;
  for (const auto& e : edges)
    if (e.required) total += e.demand;
  return total;
}

std::vector<std::string> validate_instance(const Instance& instance) {
  std::vector<std::string> issues;
  const int n = instance.node_count;
  if (n <= 0) {
    issues.push_back("node_count must be positive, got " + std::to_string(n));
    return issues;
  }
  if (instance.depot < 0 || instance.depot >= n)
    issues.push_back("depot " + std::to_string(instance.depot) + " out of range [0, " +
                     std::to_string(n - 1) + "]");
  if (instance.capacity <= 0)
    issues.push_back("capacity must be positive, got " + std::to_string(instance.capacity));

  std::vector<std::vector<int>> adjacency(n);
  for (std::size_t k = 0; k < instance.edges.size(); ++k) {
    const Edge& e = instance.edges[k];
    const std::string tag = "edge " + std::to_string(k) + " (" + std::to_string(e.u) + "-" +
                            std::to_string(e.v) + ")";
    const bool in_range = e.u >= 0 && e.u < n && e.v >= 0 && e.v < n;
    if (!in_range) issues.push_back(tag + ": endpoint out of range");
    if (e.u == e.v) issues.push_back(tag + ": self-loop");
    if (e.cost <= 0) issues.push_back(tag + ": cost must be positive");
    if (e.demand < 0) issues.push_back(tag + ": negative demand");
    if (e.required != (e.demand > 0))
      issues.push_back(tag + ": required flag disagrees with demand " + std::to_string(e.demand));
    if (e.required && instance.capacity > 0 && e.demand > instance.capacity)
      issues.push_back(tag + ": demand " + std::to_string(e.demand) + " exceeds capacity " +
                       std::to_string(instance.capacity));
    if (in_range) {
      adjacency[e.u].push_back(e.v);
      adjacency[e.v].push_back(e.u);
    }
  }

  if (instance.depot >= 0 && instance.depot < n) {
    std::vector<char> seen(n, 0);
    std::queue<int> frontier;
    frontier.push(instance.depot);
    seen[instance.depot] = 1;
    while (!frontier.empty()) {
      const int node = frontier.front();
      frontier.pop();
      for (int next : adjacency[node])
        if (!seen[next]) {
          seen[next] = 1;
          frontier.push(next);
        }
    }
    for (int v = 0; v < n; ++v)
      if (!seen[v])
        issues.push_back("node " + std::to_string(v) + " unreachable from depot " +
                         std::to_string(instance.depot));
  }
  return issues;
}

void require_valid(const Instance& instance) {
  const auto issues = validate_instance(instance);
  if (issues.empty()) return;
  std::string msg = "invalid instance '" + instance.name + "':";
  for (const auto& issue : issues) msg += "\n  " + issue;
  throw std::invalid_argument(msg);
}

namespace {

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

bool is_blank(const std::string& s) {
  return s.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

Instance read_instance(std::istream& in, const std::string& source) {
  Instance instance;
  std::string raw;
  int line_no = 0;
  int expected_edges = -1;
  bool have_name = false, have_vertices = false, have_depot = false, have_capacity = false;
  bool ended = false;

  auto next_line = [&](std::string& out) {
    while (std::getline(in, raw)) {
      ++line_no;
      out = strip_comment(raw);
      if (!is_blank(out)) return true;
    }
    return false;
  };

  std::string line;
  while (!ended && next_line(line)) {
    std::istringstream fields(line);
    std::string key;
    fields >> key;
    auto read_int = [&](long long& value) {
      if (!(fields >> value)) throw ParseError(source, line_no, "expected integer after " + key);
      std::string extra;
      if (fields >> extra) throw ParseError(source, line_no, "trailing token '" + extra + "'");
    };
    long long value = 0;
    if (key == "NAME") {
      if (!(fields >> instance.name)) throw ParseError(source, line_no, "NAME needs a value");
      have_name = true;
    } else if (key == "VERTICES") {
      read_int(value);
      instance.node_count = static_cast<int>(value);
      have_vertices = true;
    } else if (key == "DEPOT") {
      read_int(value);
      instance.depot = static_cast<int>(value);
      have_depot = true;
    } else if (key == "CAPACITY") {
      read_int(value);
      instance.capacity = value;
      have_capacity = true;
    } else if (key == "EDGES") {
      read_int(value);
      if (value < 0) throw ParseError(source, line_no, "negative edge count");
      expected_edges = static_cast<int>(value);
      for (int k = 0; k < expected_edges; ++k) {
        std::string edge_line;
        if (!next_line(edge_line))
          throw ParseError(source, line_no, "expected " + std::to_string(expected_edges) +
                                                " edge lines, got " + std::to_string(k));
        std::istringstream ef(edge_line);
        long long u, v, cost, demand, required;
        if (!(ef >> u >> v >> cost >> demand >> required))
          throw ParseError(source, line_no, "edge line needs <u> <v> <cost> <demand> <required>");
        std::string extra;
        if (ef >> extra) throw ParseError(source, line_no, "trailing token '" + extra + "'");
        if (required != 0 && required != 1)
          throw ParseError(source, line_no, "required flag must be 0 or 1");
        instance.edges.push_back(Edge{static_cast<int>(u), static_cast<int>(v), cost, demand,
                                      required == 1});
      }
    } else if (key == "END") {
      ended = true;
    } else {
      throw ParseError(source, line_no, "unknown record '" + key + "'");
    }
  }
  if (!ended) throw ParseError(source, line_no, "missing END");
  if (!have_name || !have_vertices || !have_depot || !have_capacity || expected_edges < 0)
    throw ParseError(source, line_no, "missing one of NAME/VERTICES/DEPOT/CAPACITY/EDGES");
  return instance;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file " + path);
  return read_instance(in, path);
}

void write_instance(std::ostream& out, const Instance& instance) {
  out << "NAME " << instance.name << "\n"
      << "VERTICES " << instance.node_count << "\n"
      << "DEPOT " << instance.depot << "\n"
      << "CAPACITY " << instance.capacity << "\n"
      << "EDGES " << instance.edges.size() << "\n";
  for (const auto& e : instance.edges)
    out << e.u << ' ' << e.v << ' ' << e.cost << ' ' << e.demand << ' ' << (e.required ? 1 : 0)
        << "\n";
  out << "END\n";
}

void save_instance(const std::string& path, const Instance& instance) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file " + path);
  write_instance(out, instance);
}

}  // namespace carp
