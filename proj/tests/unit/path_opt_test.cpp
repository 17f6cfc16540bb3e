#include "carp/path_opt.hpp"
#include "doctest.h"
#include "support/oracles.hpp"
#include "unit/helpers.hpp"

using namespace carp;
using testing_helpers::make;

namespace {

std::vector<oracle::Service> to_services(const Instance& inst, const ServiceOrder& order) {
  const auto req = inst.required_edges();
  std::vector<oracle::Service> out;
  for (int a : order) out.push_back({req[static_cast<std::size_t>(required_index_of(a))], is_reversed_arc(a)});
  return out;
}

}  // namespace

TEST_CASE("split base case") {
  const auto inst = make(3, 0, 100, {{0, 1, 2, 30}, {1, 2, 3, 30}});
  const auto g = transform(inst, all_pairs_shortest_paths(inst));
  const auto r = dp_split({1, 3}, g);
  CHECK(r.f_value == 0);
  CHECK(r.insertions.empty());
  CHECK(r.total == order_cost({1, 3}, g));
}

TEST_CASE("split forced by capacity") {
  const auto inst = make(3, 0, 100, {{0, 1, 2, 60}, {1, 2, 3, 60}});
  const auto d = all_pairs_shortest_paths(inst);
  const auto g = transform(inst, d);
  const auto r = dp_split({1, 3}, g);
  REQUIRE(r.insertions == std::vector<int>{0});
  CHECK(r.f_value == g.weight(1, 0) + g.weight(0, 3) - g.weight(1, 3));
  CHECK(r.total == oracle::enumerate_splits(inst, d, to_services(inst, {1, 3})).total);
}

TEST_CASE("oversized arc is reported") {
  auto inst = make(2, 0, 100, {{0, 1, 2, 60}});
  const auto g0 = transform(inst, all_pairs_shortest_paths(inst));
  inst.capacity = 50;
  const ArcGraph g(g0.arcs(), std::vector<Cost>(25, 0), 0, 50);
  try {
    dp_split({1}, g);
    FAIL("expected InfeasibleSplit");
  } catch (const InfeasibleSplit& e) {
    CHECK(e.arc() == 1);
  }
}

TEST_CASE("split matches exhaustive insertion subsets") {
  Rng rng(51);
  for (int trial = 0; trial < 150; ++trial) {
    const int required = 2 + trial % 9;
    const auto inst = oracle::random_instance(rng, 10, required, 6, 30, 12);
    const auto d = all_pairs_shortest_paths(inst);
    const auto g = transform(inst, d);
    ServiceOrder order;
    for (int k = 0; k < static_cast<int>(inst.required_edges().size()); ++k) order.push_back(arc_id(k, uniform_int(rng, 0, 1) == 1));
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(i) - 1))]);
    const auto r = dp_split(order, g);
    const auto best = oracle::enumerate_splits(inst, d, to_services(inst, order));
    REQUIRE(r.total == best.total);
    CHECK(r.insertions == best.cuts);
    CHECK(split_cost(order, g) == best.total);
    const auto sol = split_to_solution(order, r);
    CHECK(evaluate_solution(inst, d, sol).total_cost == r.total);
    CHECK(giant_order(sol) == order);
  }
}

TEST_CASE("depot stripping") {
  CHECK(strip_depot({0, 3, 5, 0, 1, 0}) == ServiceOrder{3, 5, 1});
}
