#include "carp/solution.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace carp {

std::vector<ArcEnds> arc_endpoints(const Instance& instance) {
  std::vector<ArcEnds> ends{{instance.depot, instance.depot}};
  for (int idx : instance.required_edges()) {
    const Edge& e = instance.edges[idx];
    ends.push_back({e.u, e.v});
    ends.push_back({e.v, e.u});
  }
  return ends;
}

Evaluation evaluate_solution(const Instance& instance, const DistanceMatrix& dist,
                             const Solution& solution) {
  Evaluation result;
  const auto required = instance.required_edges();
  const auto ends = arc_endpoints(instance);
  const int arc_count = static_cast<int>(ends.size());
  std::vector<int> served(required.size(), 0);
  const int depot = instance.depot;

  for (std::size_t r = 0; r < solution.routes.size(); ++r) {
    const auto& route = solution.routes[r];
    if (route.empty()) continue;
    Cost load = 0;
    int at = depot;
    bool route_ok = true;
    for (int arc : route) {
      if (arc <= kDepotArc || arc >= arc_count) {
        result.feasible = false;
        result.issues.push_back("route " + std::to_string(r) + ": invalid service arc id " +
                                std::to_string(arc));
        route_ok = false;
        continue;
      }
      const int k = required_index_of(arc);
      const Edge& e = instance.edges[required[k]];
      result.deadhead_cost += dist(at, ends[arc].start);
      result.total_cost += dist(at, ends[arc].start) + e.cost;
      at = ends[arc].end;
      load += e.demand;
      ++served[k];
    }
    result.deadhead_cost += dist(at, depot);
    result.total_cost += dist(at, depot);
    if (route_ok && load > instance.capacity) {
      result.feasible = false;
      result.issues.push_back("route " + std::to_string(r) + ": demand " + std::to_string(load) +
                              " exceeds capacity " + std::to_string(instance.capacity));
    }
  }
  for (std::size_t k = 0; k < required.size(); ++k) {
    if (served[k] == 1) continue;
    result.feasible = false;
    const Edge& e = instance.edges[required[k]];
    result.issues.push_back("required edge " + std::to_string(e.u) + "-" + std::to_string(e.v) +
                            (served[k] == 0 ? " not served" :
                                              " served " + std::to_string(served[k]) + " times"));
  }
  return result;
}

Solution& price(const Instance& instance, const DistanceMatrix& dist, Solution& solution) {
  const auto eval = evaluate_solution(instance, dist, solution);
  solution.total_cost = eval.total_cost;
  solution.deadhead_cost = eval.deadhead_cost;
  return solution;
}

void write_solution(std::ostream& out, const Instance& instance, const Solution& solution) {
  const auto ends = arc_endpoints(instance);
  std::size_t nonempty = 0;
  for (const auto& route : solution.routes) nonempty += route.empty() ? 0 : 1;
  out << "SOLUTION " << instance.name << "\n"
      << "TOTAL_COST " << solution.total_cost << "\n"
      << "DEADHEAD_COST " << solution.deadhead_cost << "\n"
      << "ROUTES " << nonempty << "\n";
  for (const auto& route : solution.routes) {
    if (route.empty()) continue;
    out << "ROUTE " << route.size();
    for (int arc : route) out << ' ' << ends[arc].start << ' ' << ends[arc].end;
    out << "\n";
  }
  out << "END\n";
}

Solution read_solution(std::istream& in, const Instance& instance, const std::string& source) {
  const auto required = instance.required_edges();
  std::vector<char> taken(required.size(), 0);
  Solution solution;
  std::string line;
  int line_no = 0;
  bool ended = false;
  long long expected_routes = -1;
  while (!ended && std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string key;
    if (!(fields >> key)) continue;
    if (key == "SOLUTION") {
      continue;
    } else if (key == "TOTAL_COST") {
      if (!(fields >> solution.total_cost)) throw ParseError(source, line_no, "bad TOTAL_COST");
    } else if (key == "DEADHEAD_COST") {
      if (!(fields >> solution.deadhead_cost)) throw ParseError(source, line_no, "bad DEADHEAD_COST");
    } else if (key == "ROUTES") {
      if (!(fields >> expected_routes)) throw ParseError(source, line_no, "bad ROUTES");
    } else if (key == "ROUTE") {
      long long count = 0;
      if (!(fields >> count) || count < 0) throw ParseError(source, line_no, "bad ROUTE length");
      std::vector<int> route;
      for (long long i = 0; i < count; ++i) {
        int u, v;
        if (!(fields >> u >> v)) throw ParseError(source, line_no, "ROUTE needs (start end) pairs");
        int found = -1;
        for (std::size_t k = 0; k < required.size() && found < 0; ++k) {
          if (taken[k]) continue;
          const Edge& e = instance.edges[required[k]];
          if (e.u == u && e.v == v) found = arc_id(static_cast<int>(k), false);
          else if (e.u == v && e.v == u) found = arc_id(static_cast<int>(k), true);
          if (found >= 0) taken[k] = 1;
        }
        if (found < 0)
          throw ParseError(source, line_no, "arc " + std::to_string(u) + "->" + std::to_string(v) +
                                                " matches no unserved required edge");
        route.push_back(found);
      }
      solution.routes.push_back(std::move(route));
    } else if (key == "END") {
      ended = true;
    } else {
      throw ParseError(source, line_no, "unknown record '" + key + "'");
    }
  }
  if (!ended) throw ParseError(source, line_no, "missing END");
  if (expected_routes >= 0 && expected_routes != static_cast<long long>(solution.routes.size()))
    throw ParseError(source, line_no, "ROUTES count disagrees with ROUTE records");
  return solution;
}

void save_solution(const std::string& path, const Instance& instance, const Solution& solution) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write solution file " + path);
  write_solution(out, instance, solution);
}

Solution load_solution(const std::string& path, const Instance& instance) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open solution file " + path);
  return read_solution(in, instance, path);
}

}  // namespace carp
