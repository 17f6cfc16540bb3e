#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "carp/instance.hpp"
#include "carp/rng.hpp"

namespace carp {

struct DatasetSpec {
  std::string name = "Task20-mini";
  int count = 500;
  int node_lo = 25;
  int node_hi = 30;
  int required_edges = 20;
  Cost demand_lo = 5;
  Cost demand_hi = 10;
  Cost capacity = 100;
  std::uint64_t seed = 1;
};

/// Desk-scale presets `Task20-mini` ... `Task100-mini` (node ranges and
/// required-edge counts of the full-scale datasets, 500 instances).
DatasetSpec dataset_preset(const std::string& name);
std::vector<std::string> preset_names();

/// Synthetic road-like instance: uniform points in the unit square joined by
/// their relative-neighborhood graph, plus short extra edges until
/// |E| >= 1.3 |V|. Costs are Euclidean lengths x100 rounded (minimum 1).
/// Required edges are drawn uniformly with demand in [demand_lo, demand_hi];
/// the depot is a random node.
Instance generate_instance(const DatasetSpec& spec, Rng& rng, const std::string& name);

/// Instance `index` of a dataset, reproducible from (spec, index) alone.
Instance generate_dataset_instance(const DatasetSpec& spec, int index);
std::vector<Instance> generate_dataset(const DatasetSpec& spec);
std::string dataset_instance_name(const DatasetSpec& spec, int index);

}  // namespace carp
