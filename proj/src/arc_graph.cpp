#include "carp/arc_graph.hpp"

#include <algorithm>

namespace carp {

ArcGraph::ArcGraph(std::vector<Arc> arcs, std::vector<Cost> weights, int depot, Cost capacity)
    : arcs_(std::move(arcs)), weights_(std::move(weights)), depot_(depot), capacity_(capacity) {}

Cost ArcGraph::max_weight() const {
  Cost best = 0;
  for (Cost w : weights_) best = std::max(best, w);
  return best;
}

ArcGraph transform(const Instance& instance, const DistanceMatrix& dist) {
  std::vector<Arc> arcs;
  arcs.push_back(Arc{0, instance.depot, instance.depot, 0, 0, true, 0});
  for (int idx : instance.required_edges()) {
    const Edge& e = instance.edges[idx];
    const int fwd = static_cast<int>(arcs.size());
    arcs.push_back(Arc{fwd, e.u, e.v, e.cost, e.demand, false, fwd + 1});
    arcs.push_back(Arc{fwd + 1, e.v, e.u, e.cost, e.demand, false, fwd});
  }
  const std::size_t n = arcs.size();
  std::vector<Cost> weights(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) weights[i * n + j] = dist(arcs[i].end, arcs[j].start);
  return ArcGraph(std::move(arcs), std::move(weights), instance.depot, instance.capacity);
}

EnvState EnvState::initial(const ArcGraph& graph, bool constrained) {
  EnvState s;
  s.remaining_capacity = graph.capacity();
  s.serve_flags.assign(graph.size(), 1);
  s.serve_flags[0] = 0;
  s.unserved_edges = (graph.size() - 1) / 2;
  s.constrained = constrained;
  s.done = s.unserved_edges == 0;
  return s;
}

ActionMask legal_actions(const EnvState& state, const ArcGraph& graph, bool constrained) {
  if (state.done) throw IllegalAction("no actions in a terminal state");
  const int n = graph.size();
  ActionMask mask(n, 0);
  bool any = false;
  for (int i = 1; i < n; ++i) {
    if (!state.serve_flags[i]) continue;
    if (constrained && graph.arc(i).demand > state.remaining_capacity) continue;
    mask[i] = 1;
    any = true;
  }
  if (state.step >= 1 && state.last() != 0) {
    mask[0] = 1;
    any = true;
  }
  if (!any)
    throw IllegalAction("no legal action at step " + std::to_string(state.step) +
                        " (remaining capacity " + std::to_string(state.remaining_capacity) + ")");
  return mask;
}

Cost apply_action(EnvState& state, int action, const ArcGraph& graph) {
  if (state.done) throw IllegalAction("step on a terminal state");
  if (action < 0 || action >= graph.size())
    throw IllegalAction("action " + std::to_string(action) + " out of range");
  const auto mask = legal_actions(state, graph, state.constrained);
  if (!mask[action]) {
    throw IllegalAction("illegal action " + std::to_string(action) + " at step " +
                        std::to_string(state.step) + " (last arc " + std::to_string(state.last()) +
                        ", remaining capacity " + std::to_string(state.remaining_capacity) + ")");
  }
  const Cost reward = -graph.weight(state.last(), action);
  if (action == 0) {
    state.remaining_capacity = graph.capacity();
  } else {
    const Arc& arc = graph.arc(action);
    state.serve_flags[action] = 0;
    state.serve_flags[arc.reverse_id] = 0;
    state.remaining_capacity = std::max<Cost>(0, state.remaining_capacity - arc.demand);
    --state.unserved_edges;
  }
  state.sequence.push_back(action);
  ++state.step;
  state.reward += reward;
  state.done = state.unserved_edges == 0 && action == 0;
  return reward;
}

StepResult step(const EnvState& state, int action, const ArcGraph& graph) {
  StepResult result{state, 0};
  result.reward = apply_action(result.state, action, graph);
  return result;
}

Solution sequence_to_solution(const std::vector<int>& sequence) {
  Solution sol;
  std::vector<int> route;
  for (int a : sequence) {
    if (a == kDepotArc) {
      if (!route.empty()) sol.routes.push_back(std::move(route));
      route.clear();
    } else {
      route.push_back(a);
    }
  }
  if (!route.empty()) sol.routes.push_back(std::move(route));
  return sol;
}

RolloutIdentity rollout_cost_identity(const Instance& instance, const DistanceMatrix& dist,
                                      const EnvState& terminal) {
  if (!terminal.done) throw std::invalid_argument("rollout identity needs a finished trajectory");
  RolloutIdentity id;
  id.evaluated_cost = evaluate_solution(instance, dist, sequence_to_solution(terminal.sequence)).total_cost;
  id.service_minus_reward = instance.service_cost() - terminal.reward;
  id.holds = id.evaluated_cost == id.service_minus_reward;
  return id;
}

}  // namespace carp
