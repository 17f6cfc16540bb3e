#include "carp/shortest_paths.hpp"

#include <algorithm>
#include <limits>

namespace carp {

Cost DistanceMatrix::max_entry() const {
  Cost best = 0;
  for (Cost d : dist_) best = std::max(best, d);
  return best;
}

std::vector<int> DistanceMatrix::path(int a, int b) const {
  std::vector<int> nodes{a};
  while (a != b) {
    a = next_hop(a, b);
    nodes.push_back(a);
  }
  return nodes;
}

DistanceMatrix all_pairs_shortest_paths(const Instance& instance) {
  const int n = instance.node_count;
  constexpr Cost kInf = std::numeric_limits<Cost>::max() / 4;
  std::vector<Cost> dist(static_cast<std::size_t>(n) * n, kInf);
  std::vector<int> next(static_cast<std::size_t>(n) * n, -1);
  auto at = [n](int a, int b) { return static_cast<std::size_t>(a) * n + b; };

  for (int v = 0; v < n; ++v) {
    dist[at(v, v)] = 0;
    next[at(v, v)] = v;
  }
  for (const auto& e : instance.edges) {
    if (e.cost < dist[at(e.u, e.v)]) {
      dist[at(e.u, e.v)] = dist[at(e.v, e.u)] = e.cost;
      next[at(e.u, e.v)] = e.v;
      next[at(e.v, e.u)] = e.u;
    }
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      const Cost dik = dist[at(i, k)];
      if (dik >= kInf) continue;
      for (int j = 0; j < n; ++j) {
        const Cost through = dik + dist[at(k, j)];
        if (through < dist[at(i, j)]) {
          dist[at(i, j)] = through;
          next[at(i, j)] = next[at(i, k)];
        }
      }
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (dist[at(i, j)] >= kInf) throw DisconnectedGraph(i, j);
  return DistanceMatrix(n, std::move(dist), std::move(next));
}

}  // namespace carp
