#pragma once

#include <array>
#include <string>

#include "carp/arc_graph.hpp"
#include "carp/rng.hpp"
#include "carp/solution.hpp"

namespace carp {

// Tie-breaking rules of classic Path-Scanning, applied among the nearest
// feasible arcs.
enum class PsRule {
  MaximizeDepotDistance,
  MinimizeDepotDistance,
  MaximizeDemandCostRatio,
  MinimizeDemandCostRatio,
  HybridHalfCapacity,  // maximize depot distance while more than half the capacity remains
};

constexpr std::array<PsRule, 5> kAllPsRules{PsRule::MaximizeDepotDistance, PsRule::MinimizeDepotDistance,
                                           PsRule::MaximizeDemandCostRatio, PsRule::MinimizeDemandCostRatio,
                                           PsRule::HybridHalfCapacity};

std::string to_string(PsRule rule);

Solution path_scanning(const Instance& instance, const ArcGraph& graph, const DistanceMatrix& dist, PsRule rule,
                       Rng& rng);

/// Runs every rule, each with its own stream derived from `seed`, and keeps
/// the cheapest solution (earliest rule on ties).
Solution ps_best_of_rules(const Instance& instance, const ArcGraph& graph, const DistanceMatrix& dist,
                          std::uint64_t seed);

}  // namespace carp
