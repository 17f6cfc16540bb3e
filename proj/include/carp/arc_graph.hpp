#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "carp/instance.hpp"
#include "carp/shortest_paths.hpp"
#include "carp/solution.hpp"

namespace carp {

struct Arc {
  int id = 0;
  int start = 0;
  int end = 0;
  Cost cost = 0;
  Cost demand = 0;
  bool is_depot = false;
  int reverse_id = 0;
};

/// Directed complete graph over service arcs plus the depot self-loop.
/// weight(i, j) is the shortest-path cost from arcs[i].end to arcs[j].start.
class ArcGraph {
 public:
  ArcGraph() = default;
  ArcGraph(std::vector<Arc> arcs, std::vector<Cost> weights, int depot, Cost capacity);

  int size() const { return static_cast<int>(arcs_.size()); }
  const Arc& arc(int i) const { return arcs_[i]; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  Cost weight(int from, int to) const { return weights_[static_cast<std::size_t>(from) * size() + to]; }
  int depot() const { return depot_; }
  Cost capacity() const { return capacity_; }
  Cost max_weight() const;

 private:
  std::vector<Arc> arcs_;
  std::vector<Cost> weights_;
  int depot_ = 0;
  Cost capacity_ = 0;
};

/// Arc ids: 0 is the depot arc; the k-th required edge (input order) becomes
/// arcs 2k+1 (u->v) and 2k+2 (v->u).
ArcGraph transform(const Instance& instance, const DistanceMatrix& dist);

class IllegalAction : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// MDP state over an ArcGraph. The initial state has x_0 = depot arc implicit,
/// so `sequence` holds only the actions taken so far.
struct EnvState {
  std::vector<int> sequence;
  Cost remaining_capacity = 0;
  std::vector<char> serve_flags;  // 1 = arc may still be served
  int step = 0;
  int unserved_edges = 0;
  Cost reward = 0;  // cumulative R so far (sum of -weights)
  bool constrained = true;
  bool done = false;

  int last() const { return sequence.empty() ? 0 : sequence.back(); }

  static EnvState initial(const ArcGraph& graph, bool constrained = true);
};

using ActionMask = std::vector<char>;

/// Legal arcs in `state`: unserved service arcs (capacity-gated when
/// constrained) and the depot arc unless it was chosen last or nothing was
/// chosen yet. Throws IllegalAction if nothing is legal.
ActionMask legal_actions(const EnvState& state, const ArcGraph& graph, bool constrained);
inline ActionMask legal_actions(const EnvState& state, const ArcGraph& graph) {
  return legal_actions(state, graph, state.constrained);
}

/// True when every service arc is done and only the closing depot return
/// remains; the rollout drivers take this step without consulting a policy.
inline bool forced_return(const EnvState& state) {
  return !state.done && state.unserved_edges == 0;
}

/// Apply `action` in place and return its reward (-weight from the last arc).
Cost apply_action(EnvState& state, int action, const ArcGraph& graph);

struct StepResult {
  EnvState state;
  Cost reward;
};
StepResult step(const EnvState& state, int action, const ArcGraph& graph);

/// Split a completed (or partial) action sequence on depot arcs into routes.
Solution sequence_to_solution(const std::vector<int>& sequence);

struct RolloutIdentity {
  Cost evaluated_cost = 0;     // evaluate_solution total cost
  Cost service_minus_reward = 0;  // service cost constant - R(tau)
  bool holds = false;
};

/// Checks evaluate_solution(total) == service_cost - R(tau) for a finished trajectory.
RolloutIdentity rollout_cost_identity(const Instance& instance, const DistanceMatrix& dist,
                                      const EnvState& terminal);

}  // namespace carp
