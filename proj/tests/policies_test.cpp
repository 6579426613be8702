#include <algorithm>

#include <gtest/gtest.h>

#include "arsched/policies.hpp"
#include "arsched/workload.hpp"
#include "fixtures.hpp"

using namespace arsched;

namespace {

AvailabilityRectangle rect(Time start, std::uint32_t pe_count, Time t_begin, Time t_end,
                           std::uint32_t n = 16) {
  return {start, t_begin, t_end, PeSet::prefix(n, pe_count)};
}

Time chosen_start(const std::vector<AvailabilityRectangle>& rs, Policy p) { return select(rs, p).start; }

std::vector<AvailabilityRectangle> random_rects(Rng& rng) {
  std::vector<AvailabilityRectangle> rs;
  const auto count = rng.uniform_int(1, 12);
  std::vector<Time> starts;
  while (static_cast<std::int64_t>(starts.size()) < count) {
    const Time s = rng.uniform_int(0, 60);
    if (std::find(starts.begin(), starts.end(), s) == starts.end()) starts.push_back(s);
  }
  for (Time s : starts) {
    // Small value ranges so equal scores are common.
    const Time begin = s - rng.uniform_int(0, 3);
    const Time end = rng.uniform01() < 0.15 ? kOpenEnd : s + rng.uniform_int(1, 4);
    rs.push_back(rect(s, static_cast<std::uint32_t>(rng.uniform_int(1, 4)), begin, end));
  }
  return rs;
}

}  // namespace

TEST(Select, WorkedExampleRectangles) {
  const auto rs = arsched::testing::example_calendar().feasible_rectangles(2, 2, 9, 2);
  ASSERT_EQ(rs.size(), 4u);
  EXPECT_EQ(chosen_start(rs, Policy::PE_W), 3);
  EXPECT_EQ(chosen_start(rs, Policy::DU_B), 3);
  EXPECT_EQ(chosen_start(rs, Policy::FF), 2);
}

TEST(Select, SingleRectangleAlwaysChosen) {
  const std::vector<AvailabilityRectangle> rs{rect(4, 2, 0, 9)};
  for (Policy p : kAllPolicies) EXPECT_EQ(chosen_start(rs, p), 4);
}

TEST(Select, TwoRectangleScoreTable) {
  const std::vector<AvailabilityRectangle> rs{rect(0, 4, 0, 10), rect(5, 2, 0, 30)};
  EXPECT_EQ(chosen_start(rs, Policy::FF), 0);
  EXPECT_EQ(chosen_start(rs, Policy::PE_B), 5);
  EXPECT_EQ(chosen_start(rs, Policy::PE_W), 0);
  EXPECT_EQ(chosen_start(rs, Policy::DU_B), 0);
  EXPECT_EQ(chosen_start(rs, Policy::DU_W), 5);
  EXPECT_EQ(chosen_start(rs, Policy::PEDU_B), 0);
  EXPECT_EQ(chosen_start(rs, Policy::PEDU_W), 5);
}

TEST(Select, OpenRectanglesRankAsLongest) {
  const std::vector<AvailabilityRectangle> rs{rect(0, 2, 0, 1000), rect(5, 1, 0, kOpenEnd)};
  EXPECT_EQ(chosen_start(rs, Policy::DU_W), 5);
  EXPECT_EQ(chosen_start(rs, Policy::PEDU_W), 5);
  EXPECT_EQ(chosen_start(rs, Policy::DU_B), 0);
  EXPECT_EQ(chosen_start(rs, Policy::PEDU_B), 0);
}

TEST(Select, EmptyListThrows) {
  EXPECT_THROW(select({}, Policy::FF), PreconditionError);
}

TEST(PolicyNames, RoundTripAndRejectUnknown) {
  for (Policy p : kAllPolicies) EXPECT_EQ(parse_policy(policy_name(p)), p);
  EXPECT_THROW(parse_policy("PE_W"), ConfigError);
  EXPECT_THROW(parse_policy("best"), ConfigError);
}

TEST(SelectProperty, PermutationInvariant) {
  Rng rng(3);
  for (int iter = 0; iter < 2000; ++iter) {
    auto rs = random_rects(rng);
    auto shuffled = rs;
    std::reverse(shuffled.begin(), shuffled.end());
    std::rotate(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(shuffled.size() / 2),
                shuffled.end());
    for (Policy p : kAllPolicies) ASSERT_EQ(select(rs, p), select(shuffled, p));
  }
}

TEST(SelectProperty, FirstFitTakesMinimumStart) {
  Rng rng(4);
  for (int iter = 0; iter < 2000; ++iter) {
    const auto rs = random_rects(rng);
    const auto min_start =
        std::min_element(rs.begin(), rs.end(), [](auto& a, auto& b) { return a.start < b.start; })->start;
    ASSERT_EQ(chosen_start(rs, Policy::FF), min_start);
  }
}

TEST(SelectProperty, BestNeverExceedsWorst) {
  Rng rng(5);
  for (int iter = 0; iter < 2000; ++iter) {
    const auto rs = random_rects(rng);
    auto score = [&](Policy p) { return RectangleScore::of(select(rs, p)); };
    ASSERT_LE(score(Policy::PE_B).pe_count, score(Policy::PE_W).pe_count);
    ASSERT_LE(score(Policy::DU_B).duration, score(Policy::DU_W).duration);
    ASSERT_LE(score(Policy::PEDU_B).area, score(Policy::PEDU_W).area);
  }
}

// Whenever several rectangles share the winning score, the earliest wins.
TEST(SelectProperty, TiesGoToEarliestStart) {
  Rng rng(6);
  for (int iter = 0; iter < 2000; ++iter) {
    const auto rs = random_rects(rng);
    for (Policy p : kAllPolicies) {
      if (p == Policy::FF) continue;
      const auto& winner = select(rs, p);
      const auto ws = RectangleScore::of(winner);
      for (const auto& r : rs) {
        const auto s = RectangleScore::of(r);
        bool tie = false;
        switch (p) {
          case Policy::PE_B: case Policy::PE_W: tie = s.pe_count == ws.pe_count; break;
          case Policy::DU_B: case Policy::DU_W: tie = s.duration == ws.duration; break;
          default: tie = s.area == ws.area; break;
        }
        if (tie) {
          ASSERT_GE(r.start, winner.start) << policy_name(p);
        }
      }
    }
  }
}

TEST(SelectProperty, ConstructedTieBreaksEarliest) {
  // Same rectangle reachable from several starts.
  std::vector<AvailabilityRectangle> rs{rect(9, 5, 3, 20), rect(6, 5, 3, 20), rect(3, 5, 3, 20)};
  for (Policy p : kAllPolicies) EXPECT_EQ(chosen_start(rs, p), 3);
}
