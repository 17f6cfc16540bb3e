#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "carp/instance.hpp"
#include "carp/shortest_paths.hpp"

namespace carp {

// Directed service arcs are identified independently of any ArcGraph object:
// the k-th required edge (input order) yields arc 2k+1 for u->v and 2k+2 for
// v->u. Arc 0 is the depot self-loop.
constexpr int kDepotArc = 0;
inline int arc_id(int required_index, bool reversed) { return 2 * required_index + 1 + (reversed ? 1 : 0); }
inline int required_index_of(int arc) { return (arc - 1) / 2; }
inline bool is_reversed_arc(int arc) { return (arc - 1) % 2 == 1; }
inline int twin_arc(int arc) { return arc == kDepotArc ? arc : (is_reversed_arc(arc) ? arc - 1 : arc + 1); }

struct Solution {
  std::vector<std::vector<int>> routes;  // directed service-arc ids, no depot arcs
  Cost total_cost = 0;
  Cost deadhead_cost = 0;
};

struct Evaluation {
  Cost total_cost = 0;
  Cost deadhead_cost = 0;
  bool feasible = true;
  std::vector<std::string> issues;  // one line per capacity/coverage violation
};

/// Start/end nodes of directed arc `arc` of `instance` (arc 0 is depot->depot).
struct ArcEnds {
  int start;
  int end;
};
std::vector<ArcEnds> arc_endpoints(const Instance& instance);

Evaluation evaluate_solution(const Instance& instance, const DistanceMatrix& dist,
                             const Solution& solution);

/// Recomputes and stores total/deadhead cost on the solution.
Solution& price(const Instance& instance, const DistanceMatrix& dist, Solution& solution);

/// Text export: one ROUTE record per route with (start end) pairs per served
/// arc, and TOTAL_COST / DEADHEAD_COST fields.
void write_solution(std::ostream& out, const Instance& instance, const Solution& solution);
Solution read_solution(std::istream& in, const Instance& instance,
                       const std::string& source = "<stream>");
void save_solution(const std::string& path, const Instance& instance, const Solution& solution);
Solution load_solution(const std::string& path, const Instance& instance);

}  // namespace carp
