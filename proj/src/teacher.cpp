#include "carp/teacher.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include "carp/baselines.hpp"
#include "carp/path_opt.hpp"

namespace carp {

// ---------------------------------------------------------------- exact

namespace {

class ExactSolver {
 public:
  ExactSolver(const Instance& instance, const DistanceMatrix& dist)
      : instance_(instance), dist_(dist), required_(instance.required_edges()) {
    m_ = static_cast<int>(required_.size());
    n_ = instance.node_count;
    cap_ = static_cast<int>(std::min<Cost>(instance.capacity, std::max<Cost>(instance.total_demand(), 1)));
    full_ = (1u << m_) - 1u;
    memo_.assign(static_cast<std::size_t>(full_ + 1) * n_ * (cap_ + 1), kUnknown);
  }

  Solution solve() {
    const int depot = instance_.depot;
    value(0, depot, cap_);
    // Walk the argmin choices to rebuild routes.
    Solution sol;
    std::vector<int> route;
    unsigned mask = 0;
    int at = depot;
    int cap = cap_;
    while (mask != full_) {
      const Choice c = best_choice(mask, at, cap);
      if (c.edge < 0) {
        sol.routes.push_back(std::move(route));
        route.clear();
        at = depot;
        cap = cap_;
        continue;
      }
      const Edge& e = instance_.edges[required_[c.edge]];
      route.push_back(arc_id(c.edge, c.reversed));
      mask |= 1u << c.edge;
      at = c.reversed ? e.u : e.v;
      cap -= static_cast<int>(e.demand);
    }
    if (!route.empty()) sol.routes.push_back(std::move(route));
    return price(instance_, dist_, sol);
  }

 private:
  static constexpr Cost kUnknown = -1;
  static constexpr Cost kInf = std::numeric_limits<Cost>::max() / 4;

  struct Choice {
    Cost cost;
    int edge;  // -1: refill at the depot
    bool reversed;
  };

  std::size_t key(unsigned mask, int at, int cap) const {
    return (static_cast<std::size_t>(mask) * n_ + at) * (cap_ + 1) + cap;
  }

  // Ties resolve to the first option in enumeration order (edge, then forward
  // before reverse, refill last), which makes reconstruction deterministic.
  Choice best_choice(unsigned mask, int at, int cap) {
    Choice best{kInf, -1, false};
    for (int k = 0; k < m_; ++k) {
      if (mask & (1u << k)) continue;
      const Edge& e = instance_.edges[required_[k]];
      if (e.demand > cap) continue;
      for (int dir = 0; dir < 2; ++dir) {
        const int s = dir == 0 ? e.u : e.v;
        const int t = dir == 0 ? e.v : e.u;
        const Cost c = dist_(at, s) + e.cost + value(mask | (1u << k), t, cap - static_cast<int>(e.demand));
        if (c < best.cost) best = Choice{c, k, dir == 1};
      }
    }
    if (cap < cap_) {
      const Cost c = dist_(at, instance_.depot) + value(mask, instance_.depot, cap_);
      if (c < best.cost) best = Choice{c, -1, false};
    }
    return best;
  }

  Cost value(unsigned mask, int at, int cap) {
    if (mask == full_) return dist_(at, instance_.depot);
    Cost& slot = memo_[key(mask, at, cap)];
    if (slot != kUnknown) return slot;
    slot = best_choice(mask, at, cap).cost;
    return slot;
  }

  const Instance& instance_;
  const DistanceMatrix& dist_;
  std::vector<int> required_;
  int m_ = 0, n_ = 0, cap_ = 0;
  unsigned full_ = 0;
  std::vector<Cost> memo_;
};

}  // namespace

Solution exact_solve(const Instance& instance, const DistanceMatrix& dist) {
  const auto required = instance.required_edges();
  if (static_cast<int>(required.size()) > kExactEdgeCap)
    throw std::invalid_argument("exact_solve handles at most " + std::to_string(kExactEdgeCap) +
                                " required edges, instance has " + std::to_string(required.size()));
  for (int idx : required)
    if (instance.edges[idx].demand > instance.capacity)
      throw std::invalid_argument("required edge demand exceeds capacity");
  if (required.empty()) return Solution{};
  return ExactSolver(instance, dist).solve();
}

// ---------------------------------------------------------------- local search

namespace {

void flip_direction(int& arc) { arc = twin_arc(arc); }

ServiceOrder relocate(ServiceOrder order, std::size_t from, std::size_t to) {
  const int arc = order[from];
  order.erase(order.begin() + static_cast<std::ptrdiff_t>(from));
  order.insert(order.begin() + static_cast<std::ptrdiff_t>(to), arc);
  return order;
}

std::size_t pick(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(n) - 1));
}

ServiceOrder random_move(const ServiceOrder& order, Rng& rng) {
  const std::size_t n = order.size();
  ServiceOrder out = order;
  const auto kind = uniform_int(rng, 0, 3);
  if (n < 2 || kind == 3) {
    flip_direction(out[pick(rng, n)]);
    return out;
  }
  std::size_t i = pick(rng, n);
  std::size_t j = pick(rng, n - 1);
  if (j >= i) ++j;
  switch (kind) {
    case 0: {
      out = relocate(out, i, j);
      if (uniform_int(rng, 0, 1) == 1) flip_direction(out[j]);
      break;
    }
    case 1:
      std::swap(out[i], out[j]);
      break;
    default: {
      if (i > j) std::swap(i, j);
      std::reverse(out.begin() + static_cast<std::ptrdiff_t>(i), out.begin() + static_cast<std::ptrdiff_t>(j) + 1);
      for (std::size_t k = i; k <= j; ++k) flip_direction(out[k]);
      break;
    }
  }
  return out;
}

}  // namespace

Solution local_search_solve(const Instance& instance, const ArcGraph& graph, const DistanceMatrix& dist,
                            const LocalSearchOptions& options, Rng& rng, std::vector<Cost>* trace) {
  const Solution initial = ps_best_of_rules(instance, graph, dist, rng());
  ServiceOrder best = giant_order(initial);
  // The split of the PS order can only improve on PS's own depot returns.
  Cost best_cost = split_cost(best, graph);
  if (trace) trace->clear();
  if (best.empty()) return initial;

  const long stall_limit =
      options.stall_limit > 0 ? options.stall_limit : std::max<long>(200, 10 * static_cast<long>(best.size()));
  ServiceOrder current = best;
  Cost current_cost = best_cost;
  long stall = 0;
  for (long it = 0; it < options.budget; ++it) {
    ServiceOrder candidate = random_move(current, rng);
    const Cost c = split_cost(candidate, graph);
    if (c < current_cost) {
      current = std::move(candidate);
      current_cost = c;
      stall = 0;
      if (c < best_cost) {
        best = current;
        best_cost = c;
      }
    } else if (++stall >= stall_limit) {
      current = best;
      for (int p = 0; p < options.perturb_moves && current.size() > 1; ++p) {
        const std::size_t from = pick(rng, current.size());
        current = relocate(current, from, pick(rng, current.size()));
      }
      current_cost = split_cost(current, graph);
      stall = 0;
    }
    if (trace) trace->push_back(best_cost);
  }

  Solution sol = split_to_solution(best, dp_split(best, graph));
  price(instance, dist, sol);
  return sol.total_cost <= initial.total_cost ? sol : initial;
}

// ---------------------------------------------------------------- labels

LabelSet replay_labels(const ArcGraph& graph, std::string instance_name, Cost cost, const std::vector<int>& actions) {
  LabelSet labels;
  labels.instance_name = std::move(instance_name);
  labels.cost = cost;
  EnvState state = EnvState::initial(graph, true);
  for (int a : actions) {
    labels.states.push_back(state);
    labels.actions.push_back(a);
    apply_action(state, a, graph);
  }
  if (!state.done) throw IllegalAction("label sequence for " + labels.instance_name + " does not finish the episode");
  return labels;
}

LabelSet labelize(const Instance& instance, const ArcGraph& graph, const DistanceMatrix& dist,
                  const Solution& solution) {
  std::vector<int> actions;
  bool first = true;
  for (const auto& route : solution.routes) {
    if (route.empty()) continue;
    if (!first) actions.push_back(kDepotArc);
    first = false;
    actions.insert(actions.end(), route.begin(), route.end());
  }
  if (!actions.empty()) actions.push_back(kDepotArc);
  const Cost cost = evaluate_solution(instance, dist, solution).total_cost;
  return replay_labels(graph, instance.name, cost, actions);
}

LabelSet equivalent_labels(const ArcGraph& graph, const LabelSet& labels, Rng& rng) {
  std::vector<std::vector<int>> routes(1);
  for (int a : labels.actions) {
    if (a == kDepotArc) {
      if (!routes.back().empty()) routes.emplace_back();
    } else {
      routes.back().push_back(a);
    }
  }
  if (routes.back().empty()) routes.pop_back();
  for (std::size_t i = routes.size(); i > 1; --i)
    std::swap(routes[i - 1], routes[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(i) - 1))]);
  std::vector<int> actions;
  for (auto& route : routes) {
    if (uniform_int(rng, 0, 1) == 1) {
      std::reverse(route.begin(), route.end());
      for (int& a : route) a = twin_arc(a);
    }
    actions.insert(actions.end(), route.begin(), route.end());
    actions.push_back(kDepotArc);
  }
  return replay_labels(graph, labels.instance_name, labels.cost, actions);
}

void write_labels(std::ostream& out, const LabelSet& labels) {
  out << "LABEL " << labels.instance_name << ' ' << labels.cost << "\n";
  for (int a : labels.actions) out << a << "\n";
}

void save_labels(const std::string& path, const LabelSet& labels) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write label file " + path);
  write_labels(out, labels);
}

LabelSet load_labels(const std::string& path, const ArcGraph& graph) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open label file " + path);
  std::string line;
  int line_no = 0;
  std::string name;
  Cost cost = 0;
  std::vector<int> actions;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    if (line_no == 1) {
      std::string key;
      if (!(fields >> key >> name >> cost) || key != "LABEL")
        throw ParseError(path, line_no, "expected 'LABEL <instance-name> <cost>'");
      continue;
    }
    int a;
    if (!(fields >> a)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ParseError(path, line_no, "expected an arc id");
    }
    if (a < 0 || a >= graph.size()) throw ParseError(path, line_no, "arc id " + std::to_string(a) + " out of range");
    actions.push_back(a);
  }
  if (line_no == 0) throw ParseError(path, 1, "empty label file");
  return replay_labels(graph, name, cost, actions);
}

}  // namespace carp
