#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "red/deadlines.hpp"

using namespace red;
using fixture::chain;

namespace {

// Level shares from the oracle's exact cumulative offsets.
std::vector<Duration> oracle_shares(const std::vector<Duration>& level_costs, Duration budget) {
  auto cum = oracle::rational_cumulative(level_costs, budget);
  std::vector<Duration> out;
  Duration prev{};
  for (auto c : cum) {
    out.push_back(c - prev);
    prev = c;
  }
  return out;
}

}  // namespace

TEST(ProportionalAssign, Chain) {
  auto d = chain();
  auto as = proportional_assign(d, d.deadline, wcet_costs(d), TimePoint::zero());
  EXPECT_EQ(as.level_shares, (std::vector<Duration>{from_seconds(30), from_seconds(30), from_seconds(60)}));
  EXPECT_EQ(as.node_subdeadlines.at("A"), from_seconds(30));
  EXPECT_EQ(as.node_subdeadlines.at("B"), from_seconds(60));
  EXPECT_EQ(as.node_subdeadlines.at("C"), from_seconds(120));
  EXPECT_EQ(as.total(), from_seconds(120));
}

TEST(ProportionalAssign, SingleNode) {
  auto d = fixture::dag({{"v", from_ms(3)}}, {}, from_ms(40));
  auto as = proportional_assign(d, d.deadline, wcet_costs(d), from_ms(7));
  EXPECT_EQ(as.level_shares, (std::vector<Duration>{from_ms(40)}));
  EXPECT_EQ(as.node_subdeadlines.at("v"), from_ms(47));
}

TEST(ProportionalAssign, Diamond) {
  auto d = fixture::diamond(Duration{1}, Duration{5}, Duration{2}, Duration{1}, Duration{18});
  auto as = proportional_assign(d, d.deadline, wcet_costs(d), TimePoint::zero());
  EXPECT_EQ(as.level_shares, (std::vector<Duration>{Duration{2}, Duration{14}, Duration{2}}));
  EXPECT_EQ(as.level_shares, oracle_shares({Duration{1}, Duration{7}, Duration{1}}, Duration{18}));
  EXPECT_EQ(as.node_subdeadlines.at("B"), Duration{16});
  EXPECT_EQ(as.node_subdeadlines.at("C"), Duration{16});
}

TEST(ProportionalAssign, Errors) {
  auto d = chain();
  CostMap zero{{"A", Duration{}}, {"B", Duration{}}, {"C", Duration{}}};
  try {
    proportional_assign(d, d.deadline, zero, TimePoint{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroTotalCost);
  }
  try {
    proportional_assign(d, d.deadline, CostMap{{"A", from_ms(1)}}, TimePoint{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingCost);
  }
}

TEST(ProportionalAssign, MatchesRationalOracle) {
  std::mt19937_64 rng(9);
  oracle::RandomDagOptions o;
  o.max_nodes = 20;
  std::uniform_int_distribution<std::int64_t> budget(1, 50'000'000'000LL);
  for (int i = 0; i < 1000; ++i) {
    auto d = oracle::random_dag(rng, o);
    const Duration b{budget(rng)};
    auto as = proportional_assign(d, b, wcet_costs(d), TimePoint{});
    std::vector<Duration> level_cost;
    for (const auto& level : level_sets(d)) {
      Duration c{};
      for (const auto& n : level) c += d.nodes.at(n).wcet;
      level_cost.push_back(c);
    }
    ASSERT_EQ(as.level_shares, oracle_shares(level_cost, b));
    ASSERT_EQ(as.total(), b);
    // Sub-deadlines are monotone along every edge.
    for (const auto& e : d.edges) ASSERT_LE(as.node_subdeadlines.at(e.from), as.node_subdeadlines.at(e.to));
  }
}

TEST(ReassignResidual, ChainAfterFirstStage) {
  auto d = chain();
  auto as = reassign_residual(d, {"A"}, from_seconds(25), d.deadline, wcet_costs(d));
  ASSERT_EQ(as.level_shares.size(), 2u);
  EXPECT_EQ(as.level_shares[0], Duration{95'000'000'000LL * 20 / 60});
  EXPECT_NEAR(to_seconds(as.level_shares[0]), 31.67, 0.005);
  EXPECT_NEAR(to_seconds(as.level_shares[1]), 63.33, 0.005);
  EXPECT_EQ(as.node_subdeadlines.at("C"), from_seconds(120));
  EXPECT_FALSE(as.node_subdeadlines.count("A"));
}

TEST(ReassignResidual, IdentityAndEmpty) {
  auto d = chain();
  EXPECT_EQ(reassign_residual(d, {}, Duration{}, d.deadline, wcet_costs(d)),
            proportional_assign(d, d.deadline, wcet_costs(d), d.arrival));
  auto done = reassign_residual(d, {"A", "B", "C"}, from_seconds(90), d.deadline, wcet_costs(d));
  EXPECT_TRUE(done.node_subdeadlines.empty());
  EXPECT_EQ(done.total(), Duration{});
}

TEST(ReassignResidual, RunningNodeKeepsRemainingCost) {
  auto d = chain();
  // B has run 10 of its 20 s: residual costs B=10, C=40 over 95 s.
  auto as = reassign_residual(d, {"A"}, from_seconds(25), d.deadline, wcet_costs(d), {{"B", from_seconds(10)}});
  EXPECT_EQ(as.level_shares[0], from_seconds(19));
  EXPECT_EQ(as.level_shares[1], from_seconds(76));
}

TEST(CapacityCheck, ChainRhoOne) {
  auto d = chain();
  auto rep = capacity_check(d, proportional_assign(d, d.deadline, wcet_costs(d), TimePoint{}), 1.0);
  ASSERT_EQ(rep.per_level.size(), 3u);
  EXPECT_EQ(rep.per_level[0].work, from_seconds(20));
  EXPECT_EQ(rep.per_level[0].bound, from_seconds(30));
  EXPECT_TRUE(rep.paper_safe());
  EXPECT_TRUE(rep.graham_safe());
}

TEST(CapacityCheck, PaperSafeButNotGrahamSafe) {
  auto d = fixture::dag({{"X", from_seconds(10)}, {"Y", from_seconds(10)}}, {}, from_seconds(10));
  auto as = proportional_assign(d, d.deadline, wcet_costs(d), TimePoint{});
  auto rep = capacity_check(d, as, 2.0);
  EXPECT_TRUE(rep.per_level[0].paper_safe);
  EXPECT_FALSE(rep.per_level[0].graham_safe);
  auto inf = capacity_check(d, as, std::numeric_limits<double>::infinity());
  EXPECT_TRUE(inf.paper_safe());
  EXPECT_TRUE(inf.graham_safe());
}

TEST(AtomicDeadline, Examples) {
  NodeAttrs a = fixture::node(from_ms(100));
  a.kind = NodeKind::Atomic;
  ContentionTable t{{{"d/n", "p"}, from_ms(30)}, {{"d/z", "p"}, Duration{}}};
  EXPECT_EQ(atomic_deadline("d/n", a, t, "p"), from_ms(130));
  EXPECT_EQ(atomic_deadline("d/z", a, t, "p"), from_ms(100));
  try {
    atomic_deadline("d/n", a, t, "other");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoProfile);
  }
  a.kind = NodeKind::Partitionable;
  EXPECT_THROW(atomic_deadline("d/n", a, t, "p"), Error);
}
