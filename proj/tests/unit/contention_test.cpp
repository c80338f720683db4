#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "red/contention.hpp"
#include "red/scenarios.hpp"

using namespace red;

namespace {

DagSpec with_mem(DagSpec d, std::initializer_list<std::pair<const char*, double>> mem) {
  for (auto [n, m] : mem) d.nodes.at(n).mem_mb = m;
  return d;
}

}  // namespace

TEST(CoRunnerMix, PicksTheLargestMemoryFootprint) {
  auto target = fixture::dag({{"t", from_ms(100)}}, {}, from_ms(500), "target");
  auto other = with_mem(fixture::dag({{"x", from_ms(10)}, {"y", from_ms(10)}}, {}, from_ms(500), "other"),
                        {{"x", 3000}, {"y", 3500}});
  std::vector<DagSpec> wl = {target, other};
  auto mix = heaviest_corunner_mix("target", "t", wl, 1);
  ASSERT_EQ(mix.size(), 1u);
  EXPECT_EQ(mix[0].node, "y");
  EXPECT_EQ(heaviest_corunner_mix("target", "t", wl, 2).size(), 2u);
}

TEST(CoRunnerMix, ExcludesNodesOrderedWithTheTarget) {
  auto d = with_mem(fixture::chain(), {{"A", 100}, {"C", 100}});
  d.nodes.emplace("P", fixture::node(from_ms(1)));
  d.nodes.at("P").mem_mb = 10;
  std::vector<DagSpec> wl = {d};
  auto mix = heaviest_corunner_mix("chain", "B", wl, 3);
  ASSERT_EQ(mix.size(), 1u);
  EXPECT_EQ(mix[0].node, "P");
  try {
    heaviest_corunner_mix("chain", "nope", wl, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NodeNotFound);
  }
}

TEST(CoRunnerMix, PairwiseConcurrentMembers) {
  // Within one DAG the mix may not contain an ordered pair.
  auto d = with_mem(fixture::dag({{"t", Duration{1}}, {"a", Duration{1}}, {"b", Duration{1}}, {"c", Duration{1}}},
                                 {{"a", "b"}}, from_ms(1), "g"),
                    {{"a", 500}, {"b", 600}, {"c", 100}});
  std::vector<DagSpec> wl = {d};
  auto mix = heaviest_corunner_mix("g", "t", wl, 3);
  ASSERT_EQ(mix.size(), 2u);
  EXPECT_EQ(mix[0].node, "b");
  EXPECT_EQ(mix[1].node, "c");
}

TEST(ProfileContention, IsolationIsZero) {
  auto d = fixture::dag({{"t", from_ms(100)}}, {}, from_ms(500), "solo");
  std::vector<DagSpec> wl = {d};
  PlatformModel p;
  std::vector<std::uint64_t> seeds = {1, 2};
  EXPECT_EQ(profile_contention("solo", "t", wl, p, ExecModel{}, seeds), Duration{});
}

TEST(ProfileContention, MatchesClosedFormSlowdown) {
  auto d = fixture::dag({{"t", from_ms(100)}}, {}, from_ms(500), "solo");
  std::vector<DagSpec> wl = {d};
  std::vector<InterferenceWindow> slow = {{TimePoint{}, from_seconds(10), 1.5}};
  std::vector<std::uint64_t> seeds = {1};
  EXPECT_EQ(profile_contention("solo", "t", wl, PlatformModel{}, ExecModel{}, seeds, slow), from_ms(50));
}

TEST(ProfileContention, MemoryPressureSlowsTheTarget) {
  auto target = with_mem(fixture::dag({{"t", from_ms(100)}}, {}, from_ms(500), "target"), {{"t", 1000}});
  auto other = with_mem(fixture::dag({{"x", from_ms(200)}}, {}, from_ms(500), "other"), {{"x", 2048}});
  std::vector<DagSpec> wl = {target, other};
  PlatformModel p;
  p.rho = 2;
  p.contention_per_gb = 0.25;
  std::vector<std::uint64_t> seeds = {1};
  // 2 GB held by the co-runner for the whole run: 100 ms * (1 + 0.5).
  EXPECT_EQ(profile_contention("target", "t", wl, p, ExecModel{}, seeds), from_ms(50));
}

TEST(ProfileAtomicNodes, CoversEveryAtomicNode) {
  ScenarioOptions o;
  o.instances = 4;
  auto w = generate_scenario("nonpartitionable(50)", o);
  std::size_t atomic = 0;
  for (const auto& t : w.dags) {
    for (const auto& [id, a] : t.dag.nodes) {
      if (a.kind != NodeKind::Atomic) continue;
      ++atomic;
      ASSERT_TRUE(w.contention.count({node_key(t.dag.id, id), w.platform.name})) << id;
    }
  }
  EXPECT_EQ(atomic, 6u);
  EXPECT_EQ(w.contention.size(), atomic);
}
