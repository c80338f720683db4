#include <gtest/gtest.h>

#include <random>

#include "red/overload.hpp"

using namespace red;

namespace {

std::vector<HealthSample> samples(std::initializer_list<std::pair<double, std::size_t>> s) {
  std::vector<HealthSample> out;
  long t = 0;
  for (auto [u, q] : s) out.push_back({t++, u, q});
  return out;
}

// n single-unit instances with scores i/(n+1) for i = 1..n, inserted in
// reverse so queue order and score order differ.
std::pair<ReadyQueue, std::vector<DropCandidate>> queue_of(std::size_t n, double score_all = -1) {
  ReadyQueue q;
  std::vector<DropCandidate> c;
  for (std::size_t i = n; i >= 1; --i) {
    const std::string id = "i" + std::to_string(i) + "/n";
    q.push(from_ms(static_cast<double>(i)), id);
    const double s = score_all >= 0 ? score_all : static_cast<double>(i) / static_cast<double>(n + 1);
    c.push_back({{from_ms(static_cast<double>(i)), id}, "i" + std::to_string(i), s, from_ms(10), from_ms(1)});
  }
  return {q, c};
}

}  // namespace

TEST(DetectOverload, Examples) {
  BurstConfig cfg;
  EXPECT_TRUE(detect_overload(samples({{0.95, 0}, {0.95, 0}, {0.95, 0}}), cfg));
  EXPECT_FALSE(detect_overload(samples({{0.95, 0}, {0.80, 0}, {0.95, 0}}), cfg));
  EXPECT_TRUE(detect_overload(samples({{0.1, 9}, {0.1, 9}, {0.1, 9}}), cfg));
  EXPECT_FALSE(detect_overload(samples({{0.9, 8}, {0.9, 8}, {0.9, 8}}), cfg));
  EXPECT_FALSE(detect_overload({}, cfg));
}

TEST(DetectOverload, EquivalentToSlidingWindow) {
  std::mt19937_64 rng(6);
  std::bernoulli_distribution hot(0.6);
  BurstConfig cfg;
  for (int i = 0; i < 2000; ++i) {
    std::vector<HealthSample> h;
    for (int j = 0; j < 8; ++j) h.push_back({j, hot(rng) ? 0.95 : 0.5, 0});
    bool expect = false;
    for (std::size_t s = 0; s + cfg.w <= h.size(); ++s) {
      bool all = true;
      for (std::size_t k = s; k < s + cfg.w; ++k) all = all && h[k].u_gpu > cfg.theta_u;
      expect = expect || all;
    }
    ASSERT_EQ(detect_overload(h, cfg), expect);
  }
}

TEST(Criticality, BoundariesAndErrors) {
  EXPECT_EQ(criticality_score(from_ms(40), from_ms(40)), 0.0);
  EXPECT_EQ(criticality_score(Duration{}, from_ms(40)), 1.0);
  EXPECT_EQ(criticality_score(from_ms(20), from_ms(40)), 0.5);
  EXPECT_EQ(criticality_score(-from_ms(20), from_ms(40)), 1.0);
  EXPECT_EQ(criticality_score(from_ms(80), from_ms(40)), 0.0);
  try {
    criticality_score(Duration{}, Duration{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveDeadlineSpan);
  }
}

TEST(Criticality, MonotoneInSlack) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::int64_t> s(-100, 200);
  for (int i = 0; i < 1000; ++i) {
    auto a = Duration{s(rng)}, b = Duration{s(rng)};
    if (a > b) std::swap(a, b);
    ASSERT_GE(criticality_score(a, Duration{100}), criticality_score(b, Duration{100}));
  }
}

TEST(ProactiveDrop, DropsTheTwoLowestScores) {
  auto [q, c] = queue_of(10);
  BurstConfig cfg;
  Projection p{Duration{}, from_seconds(10), 1.0};
  auto d = proactive_drop(q, c, cfg, p);
  EXPECT_EQ(d.dropped_instances, (std::vector<std::string>{"i1", "i2"}));
  EXPECT_EQ(q.size(), 8u);
  EXPECT_EQ(d.removed.size(), 2u);
}

TEST(ProactiveDrop, KeepsScoreOneUnits) {
  auto [q, c] = queue_of(10, 1.0);
  Projection p{from_seconds(100), from_ms(1), 1.0};
  auto d = proactive_drop(q, c, BurstConfig{}, p);
  EXPECT_TRUE(d.victims.empty());
  EXPECT_EQ(q.size(), 10u);
}

TEST(ProactiveDrop, RemovesWholeInstances) {
  ReadyQueue q;
  std::vector<DropCandidate> c;
  for (int i = 0; i < 9; ++i) {
    const std::string inst = i < 3 ? "low" : "hi" + std::to_string(i);
    const std::string id = inst + "/n" + std::to_string(i);
    q.push(from_ms(i), id);
    c.push_back({{from_ms(i), id}, inst, i < 3 ? 0.1 : 0.5, from_ms(5), from_ms(1)});
  }
  auto d = proactive_drop(q, c, BurstConfig{}, Projection{Duration{}, from_seconds(1), 1.0});
  EXPECT_EQ(d.dropped_instances, (std::vector<std::string>{"low"}));
  EXPECT_EQ(d.removed.size(), 3u);
  EXPECT_EQ(q.size(), 6u);
}

TEST(ProactiveDrop, UtilisationDrivesShedding) {
  auto [q, c] = queue_of(4);
  // 4 ms queued plus 5 ms running over a 10 ms window: 0.9 is not above theta.
  auto keep = q;
  EXPECT_TRUE(proactive_drop(keep, c, BurstConfig{}, Projection{from_ms(5), from_ms(10), 1.0}).victims.empty());
  auto d = proactive_drop(q, c, BurstConfig{}, Projection{from_ms(6), from_ms(10), 1.0});
  EXPECT_EQ(d.dropped_instances, (std::vector<std::string>{"i1"}));
}

TEST(ProactiveDrop, NeverDropsAHigherScoreBeforeALowerOne) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> score(0, 1);
  std::uniform_int_distribution<int> size(0, 20);
  for (int i = 0; i < 500; ++i) {
    ReadyQueue q;
    std::vector<DropCandidate> c;
    const int n = size(rng);
    for (int j = 0; j < n; ++j) {
      const std::string id = "i" + std::to_string(j) + "/n";
      q.push(from_ms(j), id);
      c.push_back({{from_ms(j), id}, "i" + std::to_string(j), score(rng), from_ms(1), from_ms(1)});
    }
    const auto before = q.size();
    auto d = proactive_drop(q, c, BurstConfig{}, Projection{Duration{}, from_ms(1), 1.0});
    ASSERT_EQ(q.size() + d.removed.size(), before);
    ASSERT_LE(d.victims.size(), (before > 8 ? before - 8 : 0) + 1);
    double worst_dropped = -1, best_kept = 2;
    for (const auto& x : c) {
      const bool dropped = std::find(d.removed.begin(), d.removed.end(), x.key) != d.removed.end();
      if (dropped) worst_dropped = std::max(worst_dropped, x.score);
      else best_kept = std::min(best_kept, x.score);
    }
    if (!d.removed.empty()) ASSERT_LE(worst_dropped, best_kept);
  }
}
