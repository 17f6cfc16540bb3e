#include "carp/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

namespace carp {

DatasetSpec dataset_preset(const std::string& name) {
  struct Row {
    const char* name;
    int lo, hi, required;
  };
  static constexpr Row rows[] = {{"Task20-mini", 25, 30, 20},  {"Task30-mini", 30, 35, 30},
                                 {"Task40-mini", 45, 50, 40},  {"Task50-mini", 55, 60, 50},
                                 {"Task60-mini", 65, 70, 60},  {"Task80-mini", 85, 90, 80},
                                 {"Task100-mini", 105, 110, 100}};
  for (const auto& r : rows) {
    if (name != r.name) continue;
    DatasetSpec spec;
    spec.name = r.name;
    spec.node_lo = r.lo;
    spec.node_hi = r.hi;
    spec.required_edges = r.required;
    return spec;
  }
  throw std::invalid_argument("unknown dataset preset '" + name + "'");
}

std::vector<std::string> preset_names() {
  return {"Task20-mini", "Task30-mini", "Task40-mini", "Task50-mini", "Task60-mini", "Task80-mini", "Task100-mini"};
}

namespace {

struct Point {
  double x, y;
};

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

Instance try_generate(const DatasetSpec& spec, Rng& rng, const std::string& name) {
  const int n = static_cast<int>(uniform_int(rng, spec.node_lo, spec.node_hi));
  std::vector<Point> pts(n);
  for (auto& p : pts) p = {uniform01(rng), uniform01(rng)};

  std::set<std::pair<int, int>> edges;
  // Relative-neighborhood graph: p-q unless some r is closer to both.
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      const double dpq = distance(pts[p], pts[q]);
      bool blocked = false;
      for (int r = 0; r < n && !blocked; ++r) {
        if (r == p || r == q) continue;
        blocked = std::max(distance(pts[p], pts[r]), distance(pts[q], pts[r])) < dpq;
      }
      if (!blocked) edges.insert({p, q});
    }

  const auto target = static_cast<std::size_t>(std::ceil(1.3 * n));
  const std::size_t max_edges = static_cast<std::size_t>(n) * (n - 1) / 2;
  while (edges.size() < std::min(target, max_edges)) {
    const int p = static_cast<int>(uniform_int(rng, 0, n - 1));
    std::vector<std::pair<double, int>> near;
    for (int q = 0; q < n; ++q) {
      if (q == p || edges.count({std::min(p, q), std::max(p, q)})) continue;
      near.push_back({distance(pts[p], pts[q]), q});
    }
    if (near.empty()) continue;
    std::sort(near.begin(), near.end());
    const int options = static_cast<int>(std::min<std::size_t>(4, near.size()));
    const int q = near[static_cast<std::size_t>(uniform_int(rng, 0, options - 1))].second;
    edges.insert({std::min(p, q), std::max(p, q)});
  }

  Instance inst;
  inst.name = name;
  inst.node_count = n;
  inst.capacity = spec.capacity;
  for (const auto& [p, q] : edges) {
    const Cost cost = std::max<Cost>(1, std::llround(100.0 * distance(pts[p], pts[q])));
    inst.edges.push_back(Edge{p, q, cost, 0, false});
  }
  if (static_cast<int>(inst.edges.size()) < spec.required_edges)
    throw std::runtime_error("graph has fewer edges than required edges");
  std::vector<int> ids(inst.edges.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
  // Partial Fisher-Yates for the required subset.
  for (int k = 0; k < spec.required_edges; ++k) {
    const auto j = static_cast<std::size_t>(uniform_int(rng, k, static_cast<std::int64_t>(ids.size()) - 1));
    std::swap(ids[k], ids[j]);
    Edge& e = inst.edges[ids[k]];
    e.required = true;
    e.demand = uniform_int(rng, spec.demand_lo, spec.demand_hi);
  }
  inst.depot = static_cast<int>(uniform_int(rng, 0, n - 1));
  return inst;
}

}  // namespace

Instance generate_instance(const DatasetSpec& spec, Rng& rng, const std::string& name) {
  if (spec.node_lo < 2 || spec.node_hi < spec.node_lo) throw std::invalid_argument("bad node range");
  if (spec.required_edges < 0 || spec.demand_lo < 1 || spec.demand_hi < spec.demand_lo ||
      spec.demand_hi > spec.capacity)
    throw std::invalid_argument("bad demand/required-edge settings in dataset spec " + spec.name);
  std::string last_error;
  for (int attempt = 0; attempt < 16; ++attempt) {
    try {
      Instance inst = try_generate(spec, rng, name);
      if (validate_instance(inst).empty()) return inst;
      last_error = validate_instance(inst).front();
    } catch (const std::runtime_error& e) {
      last_error = e.what();
    }
  }
  throw std::runtime_error("instance generation failed for " + name + ": " + last_error);
}

std::string dataset_instance_name(const DatasetSpec& spec, int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%05d", index);
  return spec.name + "-" + buf;
}

Instance generate_dataset_instance(const DatasetSpec& spec, int index) {
  Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(index)));
  return generate_instance(spec, rng, dataset_instance_name(spec, index));
}

std::vector<Instance> generate_dataset(const DatasetSpec& spec) {
  std::vector<Instance> out;
  out.reserve(spec.count);
  for (int i = 0; i < spec.count; ++i) out.push_back(generate_dataset_instance(spec, i));
  return out;
}

}  // namespace carp
