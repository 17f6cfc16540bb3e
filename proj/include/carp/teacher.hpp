#pragma once

#include <string>
#include <vector>

#include "carp/arc_graph.hpp"
#include "carp/rng.hpp"
#include "carp/solution.hpp"

namespace carp {

/// Largest required-edge count exact_solve accepts.
constexpr int kExactEdgeCap = 8;

/// Optimal solution by dynamic programming over (served-edge set, current
/// node, remaining capacity) with explicit depot refills. Throws
/// std::invalid_argument above kExactEdgeCap required edges.
Solution exact_solve(const Instance& instance, const DistanceMatrix& dist);

struct LocalSearchOptions {
  long budget = 10000;      // move evaluations
  long stall_limit = 0;     // 0: max(200, 10 * |E_R|)
  int perturb_moves = 3;    // random relocations per restart
};

/// Iterated local search over the giant service order. Starts from the best
/// Path-Scanning rule; moves are relocate, swap, reversed-segment (2-opt with
/// direction flips) and single direction flip; every candidate is priced by
/// the optimal depot-return split. Strict improvements are accepted, and
/// stagnation triggers a perturbed restart from the best order.
///
/// If `trace` is given it receives the best cost after every iteration.
Solution local_search_solve(const Instance& instance, const ArcGraph& graph, const DistanceMatrix& dist,
                            const LocalSearchOptions& options, Rng& rng, std::vector<Cost>* trace = nullptr);

/// Supervision for one instance: the full action sequence including interior
/// depot returns and the final forced return, plus the state before each
/// action (the one-hot target of step t is actions[t]).
struct LabelSet {
  std::string instance_name;
  Cost cost = 0;
  std::vector<int> actions;
  std::vector<EnvState> states;
};

/// Replays a feasible solution through the constrained environment. Throws
/// IllegalAction if the solution breaks the environment rules.
LabelSet labelize(const Instance& instance, const ArcGraph& graph, const DistanceMatrix& dist,
                  const Solution& solution);

/// Rebuild the per-step states of a label sequence (e.g. after reading a file).
LabelSet replay_labels(const ArcGraph& graph, std::string instance_name, Cost cost, const std::vector<int>& actions);

/// The same solution written differently: routes in a random order, each
/// traversed backwards with probability 1/2. Cost and loads are unchanged.
LabelSet equivalent_labels(const ArcGraph& graph, const LabelSet& labels, Rng& rng);

/// `LABEL <instance-name> <cost>` then one arc id per line.
void write_labels(std::ostream& out, const LabelSet& labels);
void save_labels(const std::string& path, const LabelSet& labels);
/// Reads the file and replays it on `graph`.
LabelSet load_labels(const std::string& path, const ArcGraph& graph);

}  // namespace carp
