#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "red/metrics.hpp"
#include "red/scenarios.hpp"
#include "red/simulator.hpp"

using namespace red;

namespace {

Workload single(DagSpec d, double rho) {
  Workload w;
  w.platform.rho = rho;
  w.platform.tick = from_ms(5);
  DagTemplate t;
  t.dag = std::move(d);
  w.dags.push_back(t);
  return w;
}

std::size_t count(const SimTrace& t, TraceKind k) {
  std::size_t n = 0;
  for (const auto& e : t.events) n += e.kind == k;
  return n;
}

std::string text(const SimTrace& t) {
  std::ostringstream o;
  write_trace(o, t);
  return o.str();
}

}  // namespace

TEST(Simulator, ChainOnOneSlotFinishesAtItsSum) {
  for (auto v : kAllVariants) {
    auto r = run(single(fixture::chain(), 1.0), v, 0);
    auto rows = outcomes(r.trace);
    ASSERT_EQ(rows.size(), 1u) << to_string(v);
    EXPECT_EQ(rows[0].status, OutcomeStatus::Met);
    if (v == Variant::EDF) {
      EXPECT_EQ(*rows[0].finish, from_seconds(80));
    }
  }
}

TEST(Simulator, EmptyWorkloadEmptyTrace) {
  auto r = run(Workload{}, Variant::RED, 0);
  EXPECT_TRUE(r.trace.events.empty());
  EXPECT_TRUE(r.instances.empty());
}

TEST(Simulator, IndependentNodesRunInParallel) {
  auto d = fixture::dag({{"a", from_ms(10)}, {"b", from_ms(10)}}, {}, from_ms(50));
  auto r = run(single(d, 2.0), Variant::EDF, 0);
  auto t = oracle::timing_of(r.trace);
  EXPECT_EQ(t.finish.at("g#0000/a"), from_ms(10));
  EXPECT_EQ(t.finish.at("g#0000/b"), from_ms(10));
}

TEST(Simulator, FractionalSlotRunsSlower) {
  auto d = fixture::dag({{"a", from_ms(10)}, {"b", from_ms(10)}}, {}, from_ms(50));
  auto r = run(single(d, 1.5), Variant::EDF, 0);
  auto t = oracle::timing_of(r.trace);
  EXPECT_EQ(t.finish.at("g#0000/a"), from_ms(10));
  EXPECT_EQ(t.finish.at("g#0000/b"), from_ms(20));
}

TEST(Simulator, InterferenceStretchesExecution) {
  auto w = single(fixture::dag({{"a", from_ms(100)}}, {}, from_ms(500)), 1.0);
  w.interference.push_back({TimePoint{}, from_seconds(1), 1.5});
  auto t = oracle::timing_of(run(w, Variant::EDF, 0).trace);
  EXPECT_EQ(t.finish.at("g#0000/a"), from_ms(150));
}

TEST(Simulator, MutationsAreAppliedAndReassigned) {
  ScenarioOptions o;
  o.instances = 4;
  auto w = generate_scenario("dynamic_mutation", o);
  auto r = run(w, Variant::RED, 1);
  std::vector<std::string> muts;
  std::size_t reassign_after_mutation = 0;
  for (const auto& e : r.trace.events) {
    if (e.kind == TraceKind::Mutation) muts.push_back(e.extra);
    if (e.kind == TraceKind::Reassign && e.extra == "reason=Mutation") ++reassign_after_mutation;
  }
  ASSERT_EQ(muts.size(), 2u);
  EXPECT_NE(muts[0].find("status=applied"), std::string::npos);
  EXPECT_NE(muts[1].find("status=applied"), std::string::npos);
  EXPECT_EQ(reassign_after_mutation, 2u);
  // Instances released between the two mutations carry the (refined)
  // detection stage.
  std::size_t three = 0;
  for (const auto& in : r.instances) {
    three += in.graph->nodes.count("det.enc");
    EXPECT_EQ(in.graph->nodes.count("det.enc") == 1, in.arrival >= from_seconds(3) && in.arrival < from_seconds(6));
  }
  EXPECT_GT(three, 0u);
  EXPECT_LT(three, r.instances.size());
}

TEST(Simulator, NoMutationsNoMutationEvents) {
  auto r = run(generate_scenario("cruise"), Variant::RED, 0);
  EXPECT_EQ(count(r.trace, TraceKind::Mutation), 0u);
}

TEST(Simulator, CyclicRuntimeMutationIsSkipped) {
  auto w = single(fixture::chain(), 1.0);
  w.dags[0].period = from_seconds(200);
  w.dags[0].count = 2;
  w.mutations.push_back({from_seconds(100), "chain", AddEdge{"C", "A"}});
  auto r = run(w, Variant::RED, 0);
  ASSERT_EQ(count(r.trace, TraceKind::Mutation), 1u);
  for (const auto& e : r.trace.events) {
    if (e.kind == TraceKind::Mutation) EXPECT_NE(e.extra.find("status=skipped"), std::string::npos);
  }
  EXPECT_EQ(outcomes(r.trace).size(), 2u);
}

TEST(Simulator, EdfUsesPeriodicBarriersRedDoesNot) {
  auto w = generate_scenario("cruise");
  auto edf = run(w, Variant::EDF, 0);
  auto red = run(w, Variant::RED, 0);
  std::size_t periodic_edf = 0, periodic_red = 0;
  for (const auto& e : edf.trace.events) periodic_edf += e.kind == TraceKind::Barrier && e.extra == "kind=Periodic";
  for (const auto& e : red.trace.events) periodic_red += e.kind == TraceKind::Barrier && e.extra == "kind=Periodic";
  EXPECT_GT(periodic_edf, 0u);
  EXPECT_EQ(periodic_red, 0u);
}

TEST(Simulator, RefinedVariantsRunTheRefinedGraph) {
  auto w = generate_scenario("obstacle");
  EXPECT_EQ(run(w, Variant::EDF, 0).instances[0].graph->nodes.size(), 4u);
  EXPECT_GT(run(w, Variant::RED_FG, 0).instances[0].graph->nodes.size(), 4u);
}

TEST(Simulator, AtomicNodesNeedAProfile) {
  auto d = fixture::chain();
  d.nodes.at("B").kind = NodeKind::Atomic;
  auto w = single(d, 1.0);
  try {
    run(w, Variant::RED, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidWorkload);
  }
  EXPECT_NO_THROW(run(w, Variant::EDF, 0));
  w.contention[{node_key("chain", "B"), w.platform.name}] = from_seconds(1);
  EXPECT_NO_THROW(run(w, Variant::RED, 0));
}

TEST(Simulator, HorizonExceeded) {
  auto w = single(fixture::chain(), 1.0);
  w.scheduler.horizon = from_seconds(10);
  try {
    run(w, Variant::EDF, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::HorizonExceeded);
  }
}

TEST(Simulator, PureFunctionOfItsInputs) {
  ScenarioOptions o;
  o.faults = true;
  o.interference = true;
  o.instances = 8;
  auto w = generate_scenario("urban", o);
  for (auto v : kAllVariants) {
    EXPECT_EQ(text(run(w, v, 5).trace), text(run(w, v, 5).trace));
  }
  EXPECT_NE(text(run(w, Variant::RED, 5).trace), text(run(w, Variant::RED, 6).trace));
}

TEST(Simulator, FaultsProduceRequeuesWithoutBreakingPrecedence) {
  ScenarioOptions o;
  o.faults = true;
  auto w = generate_scenario("night", o);
  w.exec.oom_probability = 0.3;
  std::size_t requeues = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (auto v : kAllVariants) {
      auto r = run(w, v, seed);
      requeues += count(r.trace, TraceKind::Requeue);
      ASSERT_TRUE(oracle::precedence_violations(r).empty());
    }
  }
  EXPECT_GT(requeues, 0u);
}

TEST(Simulator, CrossDependencyIsEnforced) {
  auto r = run(generate_scenario("async_pair"), Variant::RED, 0);
  EXPECT_FALSE(r.cross_edges.empty());
  EXPECT_TRUE(oracle::precedence_violations(r).empty());
}

TEST(Simulator, TraceRoundTrips) {
  auto r = run(generate_scenario("obstacle"), Variant::RED, 2);
  std::istringstream in(text(r.trace));
  EXPECT_EQ(read_trace(in).events, r.trace.events);
}
