#pragma once

#include <stdexcept>
#include <vector>

#include "carp/arc_graph.hpp"
#include "carp/features.hpp"
#include "carp/model.hpp"
#include "carp/solution.hpp"

namespace carp {

class InfeasibleSplit : public std::runtime_error {
 public:
  explicit InfeasibleSplit(int arc, Cost demand, Cost capacity)
      : std::runtime_error("arc " + std::to_string(arc) + " has demand " + std::to_string(demand) +
                           " above capacity " + std::to_string(capacity)),
        arc_(arc) {}
  int arc() const { return arc_; }

 private:
  int arc_;
};

/// Depot-free service order P'.
using ServiceOrder = std::vector<int>;

struct SplitResult {
  std::vector<int> insertions;  // positions i: return to depot after order[i]
  Cost f_value = 0;             // added cost of the inserted returns
  Cost g_value = 0;             // cost of the order served as a single tour
  Cost total = 0;               // f + g
};

/// Strip depot arcs from an action sequence.
ServiceOrder strip_depot(const std::vector<int>& sequence);

/// Unoptimized single-tour cost g(P'): depot leg, service, connectors and the
/// closing leg.
Cost order_cost(const ServiceOrder& order, const ArcGraph& graph);

/// Optimal depot-return insertion for a fixed service order.
///
/// f(P') = min_i f(P'_{0:i}) + SC(x_i, depot) + SC(depot, x_{i+1}) - SC(x_i, x_{i+1})
/// subject to the segment after i fitting in Q; a prefix whose demand fits
/// has f = 0. Among optimal insertion sets the one with the fewest returns,
/// then the lexicographically smallest, is returned.
SplitResult dp_split(const ServiceOrder& order, const ArcGraph& graph);

/// Same optimum as dp_split().total without tie-breaking bookkeeping.
Cost split_cost(const ServiceOrder& order, const ArcGraph& graph);

Solution split_to_solution(const ServiceOrder& order, const SplitResult& split);

/// The concatenation of a solution's routes, in route order.
ServiceOrder giant_order(const Solution& solution);

struct BeamHypothesis {
  EnvState state;
  double score = 0.0;  // sum of log-probabilities of the chosen actions
};

/// Beam search over the environment. Returns completed hypotheses, best
/// score first. Width 1 reproduces greedy decoding.
std::vector<BeamHypothesis> beam_search(const Policy& policy, const FeatureContext& context, bool constrained,
                                        int width);

struct DualDecodeReport {
  Solution solution;            // the chosen, re-split solution
  Cost constrained_total = 0;   // after DP on the constrained beam result
  Cost unconstrained_total = 0; // after DP on the unconstrained beam result
  Cost constrained_raw = 0;     // constrained beam result before DP
  bool chose_constrained = true;
};

/// Two beam searches (capacity-constrained and unconstrained); each best
/// path has its depot arcs stripped and re-split by dp_split; the cheaper
/// result wins (constrained on ties).
DualDecodeReport dual_beam_decode(const Instance& instance, const DistanceMatrix& dist,
                                  const FeatureContext& context, const Policy& policy, int beam_width = 2);

}  // namespace carp
