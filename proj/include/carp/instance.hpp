#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace carp {

using Cost = std::int64_t;

/// Raised for malformed input files. The message names the offending line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, int line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct Edge {
  int u = 0;
  int v = 0;
  Cost cost = 1;    // traversal cost, same in both directions
  Cost demand = 0;  // 0 for non-required edges
  bool required = false;
};

/// Undirected CARP instance with a single depot and homogeneous capacity.
struct Instance {
  std::string name = "unnamed";
  int node_count = 0;
  int depot = 0;
  Cost capacity = 0;
  std::vector<Edge> edges;

  /// Indices into `edges` of the required edges, in input order. The k-th
  /// entry is the "required index" k used by arc identifiers.
  std::vector<int> required_edges() const;

  /// Sum of traversal costs over required edges. Every feasible solution pays
  /// exactly this for service, independent of direction.
  Cost service_cost() const;

  Cost total_demand() const;
};

/// All invariant violations of an instance; empty when the instance is valid.
std::vector<std::string> validate_instance(const Instance& instance);

/// Throws std::invalid_argument listing every violation.
void require_valid(const Instance& instance);

Instance read_instance(std::istream& in, const std::string& source = "<stream>");
Instance load_instance(const std::string& path);
void write_instance(std::ostream& out, const Instance& instance);
void save_instance(const std::string& path, const Instance& instance);

}  // namespace carp
