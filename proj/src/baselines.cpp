#include "carp/baselines.hpp"

#include <limits>

namespace carp {

std::string to_string(PsRule rule) {
  switch (rule) {
    case PsRule::MaximizeDepotDistance: return "max-depot-distance";
    case PsRule::MinimizeDepotDistance: return "min-depot-distance";
    case PsRule::MaximizeDemandCostRatio: return "max-demand-cost-ratio";
    case PsRule::MinimizeDemandCostRatio: return "min-demand-cost-ratio";
    case PsRule::HybridHalfCapacity: return "hybrid-half-capacity";
  }
  return "unknown";
}

namespace {

// Larger key wins. Ratios are compared exactly by cross-multiplication.
bool rule_prefers(PsRule rule, const ArcGraph& g, int a, int b, Cost remaining) {
  const Arc& x = g.arc(a);
  const Arc& y = g.arc(b);
  const Cost dx = g.weight(a, kDepotArc);
  const Cost dy = g.weight(b, kDepotArc);
  if (rule == PsRule::HybridHalfCapacity)
    rule = 2 * remaining > g.capacity() ? PsRule::MaximizeDepotDistance : PsRule::MinimizeDepotDistance;
  switch (rule) {
    case PsRule::MaximizeDepotDistance: return dx > dy;
    case PsRule::MinimizeDepotDistance: return dx < dy;
    case PsRule::MaximizeDemandCostRatio: return x.demand * y.cost > y.demand * x.cost;
    case PsRule::MinimizeDemandCostRatio: return x.demand * y.cost < y.demand * x.cost;
    default: return false;
  }
}

bool rule_equal(PsRule rule, const ArcGraph& g, int a, int b, Cost remaining) {
  return !rule_prefers(rule, g, a, b, remaining) && !rule_prefers(rule, g, b, a, remaining);
}

}  // namespace

Solution path_scanning(const Instance& instance, const ArcGraph& graph, const DistanceMatrix& dist, PsRule rule,
                       Rng& rng) {
  EnvState state = EnvState::initial(graph, true);
  std::vector<int> ties;
  while (!state.done) {
    const ActionMask mask = legal_actions(state, graph);
    Cost nearest = std::numeric_limits<Cost>::max();
    for (int i = 1; i < graph.size(); ++i)
      if (mask[i]) nearest = std::min(nearest, graph.weight(state.last(), i));
    if (nearest == std::numeric_limits<Cost>::max()) {
      apply_action(state, kDepotArc, graph);
      continue;
    }
    ties.clear();
    for (int i = 1; i < graph.size(); ++i) {
      if (!mask[i] || graph.weight(state.last(), i) != nearest) continue;
      if (ties.empty() || rule_prefers(rule, graph, i, ties.front(), state.remaining_capacity)) {
        ties.assign(1, i);
      } else if (rule_equal(rule, graph, i, ties.front(), state.remaining_capacity)) {
        ties.push_back(i);
      }
    }
    const int pick = ties.size() == 1 ? ties.front()
                                      : ties[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(ties.size()) - 1))];
    apply_action(state, pick, graph);
  }
  Solution sol = sequence_to_solution(state.sequence);
  return price(instance, dist, sol);
}

Solution ps_best_of_rules(const Instance& instance, const ArcGraph& graph, const DistanceMatrix& dist,
                          std::uint64_t seed) {
  Solution best;
  bool have = false;
  for (std::size_t r = 0; r < kAllPsRules.size(); ++r) {
    Rng rng(derive_seed(seed, r));
    Solution sol = path_scanning(instance, graph, dist, kAllPsRules[r], rng);
    if (!have || sol.total_cost < best.total_cost) {
      best = std::move(sol);
      have = true;
    }
  }
  return best;
}

}  // namespace carp
