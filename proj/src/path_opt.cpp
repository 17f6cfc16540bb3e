#include "carp/path_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace carp {

ServiceOrder strip_depot(const std::vector<int>& sequence) {
  ServiceOrder order;
  for (int a : sequence)
    if (a != kDepotArc) order.push_back(a);
  return order;
}

Cost order_cost(const ServiceOrder& order, const ArcGraph& graph) {
  if (order.empty()) return 0;
  Cost g = graph.weight(kDepotArc, order.front());
  for (std::size_t i = 0; i < order.size(); ++i) {
    g += graph.arc(order[i]).cost;
    if (i + 1 < order.size()) g += graph.weight(order[i], order[i + 1]);
  }
  return g + graph.weight(order.back(), kDepotArc);
}

namespace {

void check_demands(const ServiceOrder& order, const ArcGraph& graph) {
  for (int a : order) {
    if (a <= kDepotArc || a >= graph.size()) throw std::invalid_argument("service order holds invalid arc " + std::to_string(a));
    if (graph.arc(a).demand > graph.capacity()) throw InfeasibleSplit(a, graph.arc(a).demand, graph.capacity());
  }
}

Cost insertion_delta(const ServiceOrder& order, std::size_t i, const ArcGraph& graph) {
  return graph.weight(order[i], kDepotArc) + graph.weight(kDepotArc, order[i + 1]) -
         graph.weight(order[i], order[i + 1]);
}

struct Label {
  Cost cost = 0;
  std::vector<int> positions;
  bool valid = false;
};

// (cost, count, lexicographic positions)
bool better(const Label& a, const Label& b) {
  if (!b.valid) return a.valid;
  if (!a.valid) return false;
  if (a.cost != b.cost) return a.cost < b.cost;
  if (a.positions.size() != b.positions.size()) return a.positions.size() < b.positions.size();
  return a.positions < b.positions;
}

}  // namespace

SplitResult dp_split(const ServiceOrder& order, const ArcGraph& graph) {
  check_demands(order, graph);
  SplitResult result;
  result.g_value = order_cost(order, graph);
  const std::size_t t = order.size();
  if (t == 0) return result;
  const Cost q = graph.capacity();

  std::vector<Cost> prefix(t + 1, 0);
  for (std::size_t i = 0; i < t; ++i) prefix[i + 1] = prefix[i] + graph.arc(order[i]).demand;
  auto segment_fits = [&](std::size_t from, std::size_t to) { return prefix[to + 1] - prefix[from] <= q; };

  // best[k]: optimal labelling of order[0..k] given a return right after k.
  std::vector<Label> best(t);
  for (std::size_t k = 0; k + 1 < t; ++k) {
    const Cost delta = insertion_delta(order, k, graph);
    Label cand;
    if (segment_fits(0, k)) {
      cand = Label{delta, {static_cast<int>(k)}, true};
      best[k] = cand;
    }
    for (std::size_t j = k; j-- > 0;) {
      if (!segment_fits(j + 1, k)) break;
      if (!best[j].valid) continue;
      cand.cost = best[j].cost + delta;
      cand.positions = best[j].positions;
      cand.positions.push_back(static_cast<int>(k));
      cand.valid = true;
      if (better(cand, best[k])) best[k] = cand;
    }
  }

  Label final_label;
  if (segment_fits(0, t - 1)) final_label = Label{0, {}, true};
  for (std::size_t j = t - 1; j-- > 0;) {
    if (!segment_fits(j + 1, t - 1)) break;
    if (best[j].valid && better(best[j], final_label)) final_label = best[j];
  }
  result.insertions = std::move(final_label.positions);
  result.f_value = final_label.cost;
  result.total = result.f_value + result.g_value;
  return result;
}

Cost split_cost(const ServiceOrder& order, const ArcGraph& graph) {
  const std::size_t t = order.size();
  if (t == 0) return 0;
  const Cost q = graph.capacity();
  constexpr Cost kInf = std::numeric_limits<Cost>::max() / 4;
  // Bellman recursion over segment boundaries: cost[k] = cheapest service of
  // order[0..k-1] in depot-to-depot trips.
  std::vector<Cost> cost(t + 1, kInf);
  cost[0] = 0;
  for (std::size_t start = 0; start < t; ++start) {
    if (cost[start] >= kInf) continue;
    Cost load = 0;
    Cost trip = graph.weight(kDepotArc, order[start]);
    for (std::size_t end = start; end < t; ++end) {
      const Arc& a = graph.arc(order[end]);
      if (a.demand > q) throw InfeasibleSplit(order[end], a.demand, q);
      load += a.demand;
      if (load > q) break;
      if (end > start) trip += graph.weight(order[end - 1], order[end]);
      trip += a.cost;
      const Cost closed = cost[start] + trip + graph.weight(order[end], kDepotArc);
      if (closed < cost[end + 1]) cost[end + 1] = closed;
    }
  }
  return cost[t];
}

Solution split_to_solution(const ServiceOrder& order, const SplitResult& split) {
  Solution sol;
  std::vector<int> route;
  std::size_t next = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    route.push_back(order[i]);
    if (next < split.insertions.size() && split.insertions[next] == static_cast<int>(i)) {
      sol.routes.push_back(std::move(route));
      route.clear();
      ++next;
    }
  }
  if (!route.empty()) sol.routes.push_back(std::move(route));
  sol.total_cost = split.total;
  return sol;
}

ServiceOrder giant_order(const Solution& solution) {
  ServiceOrder order;
  for (const auto& route : solution.routes) order.insert(order.end(), route.begin(), route.end());
  return order;
}

std::vector<BeamHypothesis> beam_search(const Policy& policy, const FeatureContext& context, bool constrained,
                                        int width) {
  if (width < 1) throw std::invalid_argument("beam width must be >= 1");
  const ArcGraph& graph = context.graph();
  std::vector<BeamHypothesis> active{{EnvState::initial(graph, constrained), 0.0}};
  std::vector<BeamHypothesis> completed;
  if (active.front().state.done) return active;

  struct Candidate {
    std::size_t parent;
    int action;
    double score;
  };
  while (!active.empty()) {
    std::vector<Candidate> candidates;
    for (std::size_t h = 0; h < active.size(); ++h) {
      const EnvState& s = active[h].state;
      if (forced_return(s)) {
        candidates.push_back({h, kDepotArc, active[h].score});
        continue;
      }
      const auto probs = action_probabilities(policy, context, s);
      for (int a = 0; a < static_cast<int>(probs.size()); ++a)
        if (probs[a] > 0.0) candidates.push_back({h, a, active[h].score + std::log(probs[a])});
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& x, const Candidate& y) { return x.score > y.score; });
    if (candidates.size() > static_cast<std::size_t>(width)) candidates.resize(width);
    std::vector<BeamHypothesis> next;
    for (const auto& c : candidates) {
      BeamHypothesis hyp{active[c.parent].state, c.score};
      apply_action(hyp.state, c.action, graph);
      (hyp.state.done ? completed : next).push_back(std::move(hyp));
    }
    active = std::move(next);
    // A finished hypothesis cannot be overtaken by an active one whose score
    // is already lower: log-probabilities only decrease.
    if (!completed.empty() && static_cast<int>(completed.size()) >= width) {
      double worst_kept = completed.front().score;
      for (const auto& c : completed) worst_kept = std::min(worst_kept, c.score);
      std::erase_if(active, [&](const BeamHypothesis& h) { return h.score < worst_kept; });
    }
  }
  std::stable_sort(completed.begin(), completed.end(),
                   [](const BeamHypothesis& x, const BeamHypothesis& y) { return x.score > y.score; });
  return completed;
}

DualDecodeReport dual_beam_decode(const Instance& instance, const DistanceMatrix& dist, const FeatureContext& context,
                                  const Policy& policy, int beam_width) {
  const ArcGraph& graph = context.graph();
  DualDecodeReport report;
  const auto constrained = beam_search(policy, context, true, beam_width);
  const auto unconstrained = beam_search(policy, context, false, beam_width);

  const ServiceOrder c_order = strip_depot(constrained.front().state.sequence);
  const ServiceOrder u_order = strip_depot(unconstrained.front().state.sequence);
  const SplitResult c_split = dp_split(c_order, graph);
  const SplitResult u_split = dp_split(u_order, graph);
  report.constrained_total = c_split.total;
  report.unconstrained_total = u_split.total;
  report.constrained_raw =
      evaluate_solution(instance, dist, sequence_to_solution(constrained.front().state.sequence)).total_cost;
  report.chose_constrained = c_split.total <= u_split.total;
  report.solution = report.chose_constrained ? split_to_solution(c_order, c_split) : split_to_solution(u_order, u_split);
  price(instance, dist, report.solution);
  return report;
}

}  // namespace carp
