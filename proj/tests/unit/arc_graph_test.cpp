#include "carp/arc_graph.hpp"
#include "doctest.h"
#include "support/oracles.hpp"
#include "unit/helpers.hpp"

using namespace carp;
using testing_helpers::make;

TEST_CASE("arc transform") {
  const auto inst = make(3, 0, 100, {{0, 1, 2, 4}, {1, 2, 3, 7}});
  const auto d = all_pairs_shortest_paths(inst);
  const auto g = transform(inst, d);
  CHECK(g.size() == 5);
  CHECK(g.arc(0).is_depot);
  CHECK(g.arc(1).start == 0);
  CHECK(g.arc(1).end == 1);
  CHECK(g.arc(2).start == 1);
  CHECK(g.arc(2).end == 0);
  CHECK(g.arc(4).reverse_id == 3);
  CHECK(g.weight(1, 2) == 0);
  CHECK(g.weight(3, 4) == 0);
  for (int i = 0; i < g.size(); ++i)
    for (int j = 0; j < g.size(); ++j) CHECK(g.weight(i, j) == d(g.arc(i).end, g.arc(j).start));

  const auto path = make(3, 0, 100, {{0, 1, 2}, {1, 2, 3, 5}});
  const auto gp = transform(path, all_pairs_shortest_paths(path));
  CHECK(gp.weight(kDepotArc, arc_id(0, false)) == 2);
}

TEST_CASE("legal action masks") {
  const auto inst = make(3, 0, 100, {{0, 1, 2, 4}, {1, 2, 3, 7}});
  const auto g = transform(inst, all_pairs_shortest_paths(inst));
  EnvState s = EnvState::initial(g);
  auto m = legal_actions(s, g);
  CHECK(m[0] == 0);  // nothing chosen yet
  CHECK(m[1] == 1);

  apply_action(s, 1, g);
  m = legal_actions(s, g);
  CHECK(m[1] == 0);
  CHECK(m[2] == 0);
  CHECK(m[0] == 1);

  apply_action(s, 0, g);
  CHECK(legal_actions(s, g)[0] == 0);  // no consecutive depot visits

  apply_action(s, 3, g);
  m = legal_actions(s, g);
  CHECK(m == ActionMask{1, 0, 0, 0, 0});
  CHECK(forced_return(s));
  apply_action(s, 0, g);
  CHECK(s.done);
  CHECK_THROWS_AS(legal_actions(s, g), IllegalAction);
}

TEST_CASE("capacity gate and clamping") {
  const auto inst = make(3, 0, 10, {{0, 1, 2, 7}, {1, 2, 3, 5}});
  const auto g = transform(inst, all_pairs_shortest_paths(inst));
  EnvState s = EnvState::initial(g, true);
  apply_action(s, 1, g);
  CHECK(s.remaining_capacity == 3);
  const auto m = legal_actions(s, g);
  CHECK(m[3] == 0);
  CHECK(m[4] == 0);
  CHECK_THROWS_AS(apply_action(s, 3, g), IllegalAction);

  EnvState u = EnvState::initial(g, false);
  apply_action(u, 1, g);
  CHECK(legal_actions(u, g)[3] == 1);
  apply_action(u, 3, g);
  CHECK(u.remaining_capacity == 0);
}

TEST_CASE("rewards") {
  const auto inst = make(3, 0, 100, {{0, 1, 2}, {1, 2, 3, 7}});
  const auto d = all_pairs_shortest_paths(inst);
  const auto g = transform(inst, d);
  EnvState s = EnvState::initial(g);
  CHECK(s.remaining_capacity == 100);
  CHECK(apply_action(s, arc_id(0, false), g) == -2);
  CHECK(s.remaining_capacity == 93);
  CHECK(apply_action(s, kDepotArc, g) == -d(2, 0));
  CHECK(s.reward == -7);
}

TEST_CASE("cost identity on random trajectories") {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = oracle::random_instance(rng, 6, 3, 3, 15, 8);
    const auto d = all_pairs_shortest_paths(inst);
    const auto g = transform(inst, d);
    EnvState s = EnvState::initial(g, trial % 2 == 0);
    while (!s.done) {
      const auto m = legal_actions(s, g);
      std::vector<int> legal;
      for (int i = 0; i < g.size(); ++i)
        if (m[i]) legal.push_back(i);
      apply_action(s, legal[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(legal.size()) - 1))], g);
    }
    const auto id = rollout_cost_identity(inst, d, s);
    CHECK(id.holds);
    CHECK(id.evaluated_cost == inst.service_cost() - s.reward);
    Cost oracle_total = 0;
    const auto req = inst.required_edges();
    for (const auto& r : sequence_to_solution(s.sequence).routes) {
      std::vector<oracle::Service> route;
      for (int a : r) route.push_back({req[static_cast<std::size_t>(required_index_of(a))], is_reversed_arc(a)});
      oracle_total += oracle::route_cost(inst, d, route);
    }
    CHECK(oracle_total == id.evaluated_cost);
  }
}

TEST_CASE("depot star deadhead equals minus reward") {
  const auto inst = make(4, 0, 100, {{0, 1, 3, 5}, {0, 2, 4, 5}, {0, 3, 5, 5}});
  const auto d = all_pairs_shortest_paths(inst);
  const auto g = transform(inst, d);
  EnvState s = EnvState::initial(g);
  for (int a : {1, 4, 5, 0}) apply_action(s, a, g);
  CHECK(s.done);
  const auto ev = evaluate_solution(inst, d, sequence_to_solution(s.sequence));
  CHECK(ev.deadhead_cost == -s.reward);
  CHECK(ev.deadhead_cost == 12);  // each spoke is walked back once
}

TEST_CASE("no required edges") {
  const auto inst = make(2, 0, 100, {{0, 1, 3}});
  const auto d = all_pairs_shortest_paths(inst);
  const auto g = transform(inst, d);
  EnvState s = EnvState::initial(g);
  CHECK(s.done);
  CHECK(s.reward == 0);
}
