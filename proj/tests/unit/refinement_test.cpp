#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "red/refinement.hpp"

using namespace red;

namespace {

DagSpec staged_chain(std::initializer_list<Duration> decs) {
  DagSpec d = fixture::dag({{"in", Duration{1}}, {"out", Duration{1}}}, {}, from_ms(100));
  d.nodes.emplace("mid", fixture::stage(Duration{10}, decs));
  d.edges = {{"in", "mid"}, {"mid", "out"}};
  return d;
}

// Best makespan over every assignment of jobs to m machines.
Duration brute_force_makespan(const std::vector<Duration>& jobs, std::size_t m) {
  std::size_t combos = 1;
  for (std::size_t i = 0; i < jobs.size(); ++i) combos *= m;
  Duration best = Duration::max();
  for (std::size_t code = 0; code < combos; ++code) {
    std::vector<Duration> load(m);
    std::size_t c = code;
    for (auto j : jobs) {
      load[c % m] += j;
      c /= m;
    }
    best = std::min(best, *std::max_element(load.begin(), load.end()));
  }
  return best;
}

FrontierItem item(const char* id, const char* enc, double release_ms, double sub_ms, int height = 0) {
  return {id, enc, height, from_ms(release_ms), from_ms(sub_ms)};
}

}  // namespace

TEST(Refine, StageBecomesEncoderAndDecoders) {
  auto d = staged_chain({Duration{4}, Duration{6}});
  auto r = refine(d, "mid");
  EXPECT_EQ(r.nodes.size(), 5u);
  EXPECT_EQ(r.nodes.at("mid.enc").role, NodeRole::SharedEncoder);
  EXPECT_EQ(r.nodes.at("mid.enc").encoder_ref, "enc");
  EXPECT_EQ(r.nodes.at("mid.dec1").wcet, Duration{6});
  EXPECT_TRUE(r.edges.count({"in", "mid.enc"}));
  EXPECT_TRUE(r.edges.count({"mid.dec0", "out"}));
  EXPECT_TRUE(r.edges.count({"mid.dec1", "out"}));
  // in + enc + max dec + out.
  EXPECT_EQ(critical_path_cost(r), Duration{1 + 10 + 6 + 1});
}

TEST(Refine, SingleDecoderIsAChain) {
  auto r = refine(staged_chain({Duration{4}}), "mid");
  EXPECT_EQ(critical_path_cost(r), Duration{1 + 10 + 4 + 1});
}

TEST(Refine, RequiresDecomposition) {
  auto d = fixture::chain();
  try {
    refine(d, "B");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotRefinable);
  }
}

TEST(SerializationMargin, Examples) {
  auto two = refined_stage(staged_chain({Duration{4}, Duration{6}}), "mid");
  EXPECT_EQ(serialization_margin(two, 2.0), Duration{});
  EXPECT_EQ(serialization_margin(two, 1.0), Duration{4});
  auto three = refined_stage(staged_chain({Duration{3}, Duration{3}, Duration{3}}), "mid");
  EXPECT_EQ(serialization_margin(three, 2.0), Duration{3});
  EXPECT_EQ(brute_force_makespan({Duration{3}, Duration{3}, Duration{3}}, 2) - Duration{3}, Duration{3});
}

TEST(SerializationMargin, BoundedByOptimalAndWorstCase) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> cost(1, 50), count(1, 5);
  for (int i = 0; i < 300; ++i) {
    std::vector<Duration> decs(static_cast<std::size_t>(count(rng)));
    for (auto& c : decs) c = Duration{cost(rng)};
    RefinedStage s;
    s.encoder_cost = Duration{1};
    for (std::size_t j = 0; j < decs.size(); ++j) s.decoders.emplace_back("d" + std::to_string(j), decs[j]);
    const Duration max = *std::max_element(decs.begin(), decs.end());
    const Duration sum = std::accumulate(decs.begin(), decs.end(), Duration{});
    for (std::size_t m : {1u, 2u, 4u}) {
      const Duration xi = serialization_margin(s, static_cast<double>(m));
      ASSERT_GE(xi, brute_force_makespan(decs, m) - max);
      ASSERT_LE(xi, sum - max);
      if (m >= decs.size()) ASSERT_EQ(xi, Duration{});
    }
  }
}

TEST(DynamicMerge, WithinGammaSharesOneEncoderRun) {
  auto units = dynamic_merge({item("a", "E", 0, 50), item("b", "E", 80, 40)}, from_ms(100));
  ASSERT_EQ(units.size(), 1u);
  EXPECT_EQ(units[0].members, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(units[0].encoder_executions, 1);
  EXPECT_EQ(units[0].unit_deadline, from_ms(40));
}

TEST(DynamicMerge, SplitsOnSkewEncoderOrHeight) {
  EXPECT_EQ(dynamic_merge({item("a", "E", 0, 50), item("b", "E", 150, 40)}, from_ms(100)).size(), 2u);
  EXPECT_EQ(dynamic_merge({item("a", "E", 0, 50), item("b", "F", 0, 40)}, from_ms(100)).size(), 2u);
  EXPECT_EQ(dynamic_merge({item("a", "E", 0, 50, 0), item("b", "E", 0, 40, 1)}, from_ms(100)).size(), 2u);
  EXPECT_EQ(dynamic_merge({item("a", "", 0, 50), item("b", "", 0, 40)}, from_ms(100)).size(), 2u);
}

TEST(DynamicMerge, PartitionsTheFrontier) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> enc(0, 2), h(0, 2), rel(0, 400), sub(1, 1000);
  for (int i = 0; i < 200; ++i) {
    std::vector<FrontierItem> f;
    for (int j = 0; j < 12; ++j) {
      const int e = enc(rng);
      f.push_back({"u" + std::to_string(j), e == 0 ? "" : "E" + std::to_string(e), h(rng), from_ms(rel(rng)),
                   from_ms(sub(rng))});
    }
    auto units = dynamic_merge(f, from_ms(100));
    std::vector<std::string> seen;
    for (std::size_t u = 0; u < units.size(); ++u) {
      if (u > 0) ASSERT_LE(units[u - 1].unit_deadline, units[u].unit_deadline);
      TimePoint lo = TimePoint::max(), hi = TimePoint::min(), dl = TimePoint::max();
      for (const auto& m : units[u].members) {
        seen.push_back(m);
        const auto& it = *std::find_if(f.begin(), f.end(), [&](const FrontierItem& x) { return x.id == m; });
        lo = std::min(lo, it.predicted_release);
        hi = std::max(hi, it.predicted_release);
        dl = std::min(dl, it.subdeadline);
        if (units[u].members.size() > 1) ASSERT_EQ(it.encoder, units[u].shared_encoder);
      }
      ASSERT_LE(hi - lo, from_ms(100));
      ASSERT_EQ(dl, units[u].unit_deadline);
    }
    std::sort(seen.begin(), seen.end());
    ASSERT_EQ(seen.size(), f.size());
    ASSERT_TRUE(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
  }
}

TEST(RefineAll, IdentityWithoutStages) {
  auto d = fixture::chain();
  EXPECT_EQ(refine_all(d), d);
}

TEST(RefineAll, NodeCountAndHeightShift) {
  DagSpec d = fixture::dag({{"in", Duration{1}}, {"out", Duration{1}}}, {}, from_ms(100));
  d.nodes.emplace("s1", fixture::stage(Duration{5}, {Duration{1}, Duration{2}, Duration{3}}));
  d.nodes.emplace("s2", fixture::stage(Duration{5}, {Duration{1}, Duration{2}}));
  d.edges = {{"in", "s1"}, {"in", "s2"}, {"s1", "out"}, {"s2", "out"}};
  auto r = refine_all(d);
  EXPECT_EQ(r.nodes.size(), d.nodes.size() + 3 + 2);
  EXPECT_EQ(heights(r).at("out"), heights(d).at("out") + 1);
}

TEST(RefineAll, NeverLengthensWithEnoughSlots) {
  std::mt19937_64 rng(12);
  oracle::RandomDagOptions o;
  o.refinable_probability = 0.7;
  for (int i = 0; i < 300; ++i) {
    auto d = oracle::random_dag(rng, o);
    ASSERT_LE(critical_path_cost(refine_all(d)), critical_path_cost(d));
  }
}
