#pragma once

#include <stdexcept>
#include <vector>

#include "carp/instance.hpp"

namespace carp {

class DisconnectedGraph : public std::runtime_error {
 public:
  DisconnectedGraph(int from, int to)
      : std::runtime_error("no path between nodes " + std::to_string(from) + " and " +
                           std::to_string(to)),
        from_(from),
        to_(to) {}
  int from() const { return from_; }
  int to() const { return to_; }

 private:
  int from_, to_;
};

/// All-pairs shortest path costs with next-hop reconstruction.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(int n, std::vector<Cost> dist, std::vector<int> next_hop)
      : n_(n), dist_(std::move(dist)), next_(std::move(next_hop)) {}

  int size() const { return n_; }
  Cost operator()(int a, int b) const { return dist_[static_cast<std::size_t>(a) * n_ + b]; }
  int next_hop(int a, int b) const { return next_[static_cast<std::size_t>(a) * n_ + b]; }
  Cost max_entry() const;

  /// Node sequence of one shortest path from a to b, both endpoints included.
  std::vector<int> path(int a, int b) const;

 private:
  int n_ = 0;
  std::vector<Cost> dist_;
  std::vector<int> next_;
};

/// Floyd-Warshall over the undirected edge set. Parallel edges keep the
/// cheapest. Throws DisconnectedGraph naming the first unreachable pair.
DistanceMatrix all_pairs_shortest_paths(const Instance& instance);

}  // namespace carp
