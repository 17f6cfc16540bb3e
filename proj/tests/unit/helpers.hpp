#pragma once

#include <initializer_list>

#include "carp/instance.hpp"

namespace testing_helpers {

struct E {
  int u, v;
  carp::Cost cost;
  carp::Cost demand = 0;
};

/// Small hand-built instance; edges with positive demand are required.
inline carp::Instance make(int nodes, int depot, carp::Cost capacity, std::initializer_list<E> edges) {
  carp::Instance inst;
  inst.name = "hand";
  inst.node_count = nodes;
  inst.depot = depot;
  inst.capacity = capacity;
  for (const auto& e : edges) inst.edges.push_back({e.u, e.v, e.cost, e.demand, e.demand > 0});
  return inst;
}

}  // namespace testing_helpers
