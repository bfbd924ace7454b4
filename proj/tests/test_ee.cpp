#include <gtest/gtest.h>

#include "coopsim/ee/ee.hpp"
#include "support.hpp"

using namespace coopsim;
using namespace coopsim::ee;

namespace {

struct Harness {
  std::vector<std::unique_ptr<Agent>> owned;
  AgentSet set;
  MemoryEventSink sink;
};

RunResult run_scripted(const RunConfig& cfg, EeScenario& scenario, Harness& run) {
  for (const auto& a : cfg.roster) {
    run.owned.push_back(make_scripted_agent(a, cfg.scenario));
    run.set[a.id] = run.owned.back().get();
  }
  return run_simulation(cfg, scenario, run.set, run.sink, "ee");
}

}  // namespace

TEST(EeGrid, ExitsAreCenteredSpansOnThreeWalls) {
  const Grid g(33, 33, 3);
  EXPECT_EQ(g.exit(ExitId::Left).cells, (std::vector<Cell>{{16, 1}, {17, 1}, {18, 1}}));
  EXPECT_EQ(g.exit(ExitId::Bottom).cells, (std::vector<Cell>{{33, 16}, {33, 17}, {33, 18}}));
  EXPECT_EQ(g.exit(ExitId::Right).cells, (std::vector<Cell>{{16, 33}, {17, 33}, {18, 33}}));
  EXPECT_EQ(g.exit(ExitId::Bottom).center, (Cell{33, 17}));
  EXPECT_EQ(g.exit_at({17, 1}), ExitId::Left);
  EXPECT_FALSE(g.exit_at({1, 17}).has_value());
}

TEST(EeGrid, ChebyshevDistanceToExitSpan) {
  const Grid g(33, 33, 3);
  EXPECT_EQ(chebyshev({1, 1}, {4, 3}), 3);
  EXPECT_EQ(exit_distance({17, 17}, g.exit(ExitId::Left)), 16);
  EXPECT_EQ(exit_distance({1, 1}, g.exit(ExitId::Left)), 15);
  EXPECT_EQ(exit_distance({30, 17}, g.exit(ExitId::Bottom)), 3);
  EXPECT_EQ(exit_distance({33, 1}, g.exit(ExitId::Bottom)), 15);
}

TEST(EeGrid, LegalMovesRespectWallsAndOccupancy) {
  Grid g(33, 33, 3);
  auto codes = [](const std::vector<MoveOption>& v) {
    std::string s;
    for (const auto& m : v) s += m.code;
    return s;
  };
  EXPECT_EQ(codes(legal_moves({1, 1}, g)), "EGHS");
  EXPECT_EQ(codes(legal_moves({10, 10}, g)), "ABCDEFGHS");
  g.place("x", {11, 11});
  g.place("y", {9, 10});
  EXPECT_EQ(codes(legal_moves({10, 10}, g)), "ACDEFGS");
}

TEST(EeGrid, CongestionAndHearing) {
  Grid g(33, 33, 3);
  g.place("me", {17, 10});
  g.place("a", {17, 5});   // between me and the left exit
  g.place("b", {17, 20});  // behind me
  g.place("c", {20, 10});
  EXPECT_EQ(congestion_count({17, 10}, g.exit(ExitId::Left), g, 10), 1);
  EXPECT_EQ(congestion_count({17, 10}, g.exit(ExitId::Right), g, 10), 1);
  EXPECT_EQ(congestion_count({17, 10}, g.exit(ExitId::Bottom), g, 10), 1);
  EXPECT_EQ(hearable_agents({17, 10}, g, 5), (std::vector<AgentId>{"a", "c"}));
  EXPECT_EQ(agents_within({17, 10}, g, 10).size(), 3u);
}

TEST(EeMoves, ConflictsDowngradeToStay) {
  Grid g(33, 33, 3);
  g.place("a", {10, 10});
  g.place("b", {10, 12});
  const auto r = apply_moves({{"a", {10, 10}, {10, 11}}, {"b", {10, 12}, {10, 11}}}, g);
  EXPECT_FALSE(r.moves[0].downgraded);
  EXPECT_TRUE(r.moves[1].downgraded);
  EXPECT_EQ(g.at({10, 11}), "a");
  EXPECT_EQ(g.at({10, 12}), "b");
}

TEST(EeMoves, ChainMovesFollowRequestOrder) {
  Grid g(33, 33, 3);
  g.place("a", {10, 10});
  g.place("b", {10, 11});
  // a asks first for b's cell: still occupied, so a stays; b then moves on.
  const auto r = apply_moves({{"a", {10, 10}, {10, 11}}, {"b", {10, 11}, {10, 12}}}, g);
  EXPECT_TRUE(r.moves[0].downgraded);
  EXPECT_EQ(g.at({10, 12}), "b");
  EXPECT_EQ(g.at({10, 10}), "a");
}

TEST(EeMoves, ReachingAnExitCellEscapes) {
  Grid g(33, 33, 3);
  g.place("a", {17, 2});
  g.place("b", {32, 17});
  const auto r = apply_moves({{"a", {17, 2}, {17, 1}}, {"b", {32, 17}, {33, 17}}}, g);
  ASSERT_EQ(r.escapes.size(), 2u);
  EXPECT_EQ(r.escapes[0].exit, ExitId::Left);
  EXPECT_EQ(r.escapes[1].exit, ExitId::Bottom);
  EXPECT_EQ(g.population(), 0u);
}

TEST(EeMoves, RejectsNonAdjacentTargets) {
  Grid g(33, 33, 3);
  g.place("a", {10, 10});
  const auto r = apply_moves({{"a", {10, 10}, {12, 12}}}, g);
  EXPECT_TRUE(r.moves[0].downgraded);
  EXPECT_THROW(apply_moves({{"a", {5, 5}, {5, 6}}}, g), std::logic_error);
}

TEST(EeGreedy, NeverWorseThanStaying) {
  Grid g(33, 33, 3);
  RngStream rng(9);
  for (int i = 0; i < 500; ++i) {
    const Cell pos{1 + static_cast<int>(rng.uniform_below(33)), 1 + static_cast<int>(rng.uniform_below(33))};
    if (g.exit_at(pos)) continue;
    for (const auto& e : g.exits()) {
      const auto m = greedy_move(pos, e, legal_moves(pos, g));
      EXPECT_EQ(exit_distance(m.target, e), exit_distance(pos, e) - 1);
    }
  }
}

TEST(EeScenario, SingleGreedyAgentTakesExactlyTheExitDistance) {
  RngStream rng(42);
  const Grid empty(33, 33, 3);
  for (int i = 0; i < 100; ++i) {
    Cell start;
    do {
      start = {1 + static_cast<int>(rng.uniform_below(33)), 1 + static_cast<int>(rng.uniform_below(33))};
    } while (empty.exit_at(start));
    int d = std::numeric_limits<int>::max();
    for (const auto& e : empty.exits()) d = std::min(d, exit_distance(start, e));

    RunConfig cfg = test::ee_config(1, Backend::Scripted, 1, {{"initial_positions", {{start.x, start.y}}}});
    cfg.max_rounds = 100;
    EeScenario scenario(cfg);
    Harness run;
    const auto result = run_scripted(cfg, scenario, run);
    EXPECT_EQ(result.rounds_executed, d) << to_string(start);
    EXPECT_EQ(result.termination_reason, TerminationReason::AllEscaped);
  }
}

TEST(EeScenario, HundredGreedyAgentsKeepInvariantsEveryRound) {
  const RunConfig cfg = test::ee_config(100, Backend::Scripted, 7);
  EeScenario scenario(cfg);
  Harness run;
  const auto result = run_scripted(cfg, scenario, run);

  std::map<int, std::set<Cell>> occupied;
  std::map<int, int> summaries;
  for (const auto& e : run.sink.events()) {
    if (e.kind != EventKind::Update) continue;
    if (e.agent_id.empty()) {
      const auto& s = e.payload;
      const int cum = s.at("escaped_cum");
      EXPECT_EQ(cum, s.at("escaped_left").get<int>() + s.at("escaped_bottom").get<int>() + s.at("escaped_right").get<int>());
      EXPECT_EQ(cum + s.at("remaining").get<int>(), 100);
      ++summaries[e.round];
    } else if (!e.payload.at("escaped").get<bool>()) {
      const Cell to{e.payload.at("to")[0].get<int>(), e.payload.at("to")[1].get<int>()};
      EXPECT_TRUE(occupied[e.round].insert(to).second) << "two agents on " << to_string(to) << " in round " << e.round;
    }
  }
  EXPECT_EQ(static_cast<int>(summaries.size()), result.rounds_executed);
  EXPECT_EQ(scenario.escaped_total() + static_cast<int>(scenario.grid().population()), 100);
}

TEST(EeScenario, RandomPlacementAvoidsExitsAndOverlaps) {
  const RunConfig cfg = test::ee_config(100, Backend::Scripted, 3);
  EeScenario scenario(cfg);
  RngStream rng = RngStream::for_round(cfg.seed, 0);
  scenario.initialize(rng);
  EXPECT_EQ(scenario.grid().population(), 100u);
  std::set<Cell> cells;
  scenario.grid().for_each_occupied([&](Cell c, const AgentId&) {
    EXPECT_FALSE(scenario.grid().exit_at(c).has_value());
    cells.insert(c);
  });
  EXPECT_EQ(cells.size(), 100u);
}

TEST(EeScenario, ExitCellPassesOneAgentPerRound) {
  // Three agents queued straight above the middle bottom exit cell.
  RunConfig cfg = test::ee_config(3, Backend::Scripted, 1, {{"initial_positions", {{32, 17}, {31, 17}, {30, 17}}}});
  cfg.max_rounds = 10;
  EeScenario scenario(cfg);
  Harness run;
  const auto result = run_scripted(cfg, scenario, run);
  EXPECT_EQ(result.termination_reason, TerminationReason::AllEscaped);
  for (const auto& e : run.sink.events()) {
    if (e.kind == EventKind::Update && e.agent_id.empty()) {
      EXPECT_LE(e.payload.at("escaped_cum").get<int>(), 3 * e.round);
    }
  }
  EXPECT_EQ(scenario.count(ExitId::Bottom), 3);
}

TEST(EeScenario, BadInitialPositionsAreConfigErrors) {
  RunConfig cfg = test::ee_config(1, Backend::Scripted, 1, {{"initial_positions", {{17, 1}}}});
  EeScenario scenario(cfg);
  RngStream rng(1);
  EXPECT_THROW(scenario.initialize(rng), ConfigError);
  EXPECT_THROW(EeScenario(test::ee_config(2, Backend::Scripted, 1, {{"initial_positions", {{5, 5}}}})), ConfigError);
  json big{{"height", 5}, {"width", 5}};
  RunConfig crowded = test::make_config(ScenarioId::EE, 30, Backend::Scripted, big);
  EeScenario too_small(crowded);
  EXPECT_THROW(too_small.initialize(rng), ConfigError);
}

TEST(EeReplanGate, FrequencyMatchesProbability) {
  RngStream rng(123);
  int hits = 0;
  for (int i = 0; i < 100000; ++i) hits += should_replan(rng, 0.2) ? 1 : 0;
  EXPECT_NEAR(hits / 100000.0, 0.2, 0.01);
  EXPECT_FALSE(should_replan(rng, 0.0));
  EXPECT_TRUE(should_replan(rng, 1.0));
}

TEST(EeScenario, MoveListQuotesCodes) {
  RunConfig cfg = test::ee_config(1, Backend::Scripted, 1, {{"initial_positions", {{1, 1}}}});
  EeScenario scenario(cfg);
  RngStream rng(1);
  scenario.initialize(rng);
  scenario.begin_round(1, Ordering{1, {"agent1"}}, rng);
  const auto ctx = scenario.context("agent1", Phase::Action, 1, 0, rng);
  const std::string list = ctx.bindings.at("move_directions_list");
  EXPECT_NE(list.find("'E' (right to (1, 2))"), std::string::npos) << list;
  EXPECT_NE(list.find("'S' (stay at (1, 1))"), std::string::npos) << list;
  EXPECT_EQ(std::get<EeView>(ctx.view).options.size(), 4u);
}

TEST(EeScenario, SnapshotsRenderTheRoom) {
  RunConfig cfg = test::ee_config(2, Backend::Scripted, 1, {{"snapshots", true}});
  cfg.max_rounds = 2;
  EeScenario scenario(cfg);
  Harness run;
  run_scripted(cfg, scenario, run);
  ASSERT_EQ(scenario.frames().size(), 2u);
  const auto& frame = scenario.frames()[0].second;
  EXPECT_EQ(std::count(frame.begin(), frame.end(), '\n'), 33);
  EXPECT_EQ(std::count(frame.begin(), frame.end(), '@'), 2);
  EXPECT_EQ(std::count(frame.begin(), frame.end(), 'L'), 3);
}
