#include <sstream>

#include <gtest/gtest.h>

#include "arsched/oracle.hpp"
#include "arsched/simengine.hpp"
#include "arsched/validate.hpp"

using namespace arsched;

namespace {

// Random requests on a 16-PE cluster whose reservations stay below tick 4096.
std::vector<ARRequest> small_workload(std::uint64_t seed, std::size_t count) {
  Rng rng(seed);
  std::vector<ARRequest> out;
  Time t = 0;
  for (std::size_t i = 0; i < count; ++i) {
    t += rng.uniform_int(0, 6);
    ARRequest r;
    r.id = i;
    r.t_a = t;
    r.t_du = rng.uniform_int(1, 20);
    r.t_r = t + rng.uniform_int(0, 15);
    r.t_dl = r.t_r + r.t_du + rng.uniform_int(0, 25);
    r.n_pe = static_cast<std::uint32_t>(rng.uniform_int(1, 16));
    out.push_back(r);
  }
  return out;
}

oracle::DenseTimeline dense_copy(const AvailabilityCalendar& cal, Time horizon) {
  oracle::DenseTimeline tl(cal.n_pes(), horizon);
  for (std::size_t i = 0; i + 1 < cal.records().size(); ++i) {
    const auto& r = cal.records()[i];
    if (!r.busy.empty()) tl.add(r.time, cal.records()[i + 1].time, r.busy.ids());
  }
  return tl;
}

}  // namespace

TEST(Simulate, SingleRequestOnEmptyCluster) {
  const std::vector<ARRequest> reqs{{7, 10, 25, 100, 400, 64}};
  const auto out = simulate(reqs, ClusterConfig{1024}, Policy::PE_W);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_TRUE(out[0].accepted);
  EXPECT_EQ(out[0].start, 25);
  EXPECT_EQ(out[0].wait, 0);
  EXPECT_DOUBLE_EQ(out[0].slowdown, 1.0);
}

TEST(Simulate, WorkedExampleScenario) {
  const std::vector<ARRequest> reqs{
      {1, 0, 0, 3, 3, 2},    // job1: running
      {2, 0, 0, 1, 1, 2},    // job2: running
      {3, 0, 8, 2, 10, 1},   // job3: reserved
      {4, 0, 2, 2, 9, 2},    // new request
  };
  const auto out = simulate(reqs, ClusterConfig{8}, Policy::PE_W);
  ASSERT_EQ(out.size(), 4u);
  for (const auto& o : out) EXPECT_TRUE(o.accepted);
  EXPECT_EQ(out[3].start, 3);
  EXPECT_EQ(out[3].wait, 1);
  EXPECT_DOUBLE_EQ(out[3].slowdown, 1.5);
}

TEST(Simulate, CapacityRejectsSecondFullClusterRequest) {
  const std::vector<ARRequest> reqs{{0, 0, 0, 10, 10, 16}, {1, 0, 0, 10, 10, 16}};
  const auto out = simulate(reqs, ClusterConfig{16}, Policy::FF);
  EXPECT_TRUE(out[0].accepted);
  EXPECT_FALSE(out[1].accepted);
}

TEST(Simulate, CompletionFreesCapacityBeforeSimultaneousArrival) {
  const std::vector<ARRequest> reqs{{0, 0, 0, 10, 10, 16}, {1, 10, 10, 5, 15, 16}};
  const auto out = simulate(reqs, ClusterConfig{16}, Policy::FF);
  EXPECT_TRUE(out[1].accepted);
  EXPECT_EQ(out[1].start, 10);
}

TEST(Simulate, RejectsUnsortedOrInvalidRequests) {
  const std::vector<ARRequest> unsorted{{0, 5, 5, 1, 6, 1}, {1, 4, 4, 1, 5, 1}};
  EXPECT_THROW(simulate(unsorted, ClusterConfig{4}, Policy::FF), PreconditionError);
  const std::vector<ARRequest> too_wide{{0, 0, 0, 1, 1, 5}};
  EXPECT_THROW(simulate(too_wide, ClusterConfig{4}, Policy::FF), PreconditionError);
  const std::vector<ARRequest> past_ready{{0, 5, 3, 1, 9, 1}};
  EXPECT_THROW(simulate(past_ready, ClusterConfig{4}, Policy::FF), PreconditionError);
}

// Replaying accepted outcomes into the dense oracle never double-books a PE,
// every job meets its deadline and the calendar drains.
TEST(SimulateProperty, AcceptedScheduleIsSound) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto reqs = small_workload(seed, 300);
    for (Policy p : kAllPolicies) {
      Simulator sim(ClusterConfig{16}, p);
      const auto out = sim.run(reqs);
      EXPECT_TRUE(sim.calendar().empty());
      oracle::DenseTimeline tl(16, 4096);
      for (const auto& o : out) {
        if (!o.accepted) continue;
        ASSERT_GE(o.start, o.request.t_r);
        ASSERT_LE(o.start + o.request.t_du, o.request.t_dl);
        ASSERT_EQ(o.pes.count(), o.request.n_pe);
        ASSERT_GE(o.slowdown, 1.0);
        ASSERT_NO_THROW(tl.add(o.start, o.start + o.request.t_du, o.pes.ids()));
      }
    }
  }
}

TEST(SimulateProperty, Deterministic) {
  const auto reqs = small_workload(77, 400);
  for (Policy p : kAllPolicies) EXPECT_EQ(simulate(reqs, ClusterConfig{16}, p), simulate(reqs, ClusterConfig{16}, p));
}

// FF admits at the earliest candidate start with enough free PEs.
TEST(SimulateProperty, FirstFitStartIsMinimalFeasibleCandidate) {
  const auto reqs = small_workload(5, 300);
  Simulator sim(ClusterConfig{16}, Policy::FF);
  int checked = 0;
  sim.set_observer([&](const AvailabilityCalendar& cal, const ARRequest& r, const std::optional<Placement>& pl) {
    const auto tl = dense_copy(cal, 4096);
    const auto want = tl.find(r.t_r, r.t_du, r.t_dl, r.n_pe, Policy::FF, true);
    ASSERT_EQ(pl.has_value(), want.has_value());
    if (pl) {
      EXPECT_EQ(pl->start, want->start);
      ++checked;
    }
  });
  sim.run(reqs);
  EXPECT_GT(checked, 50);
}

TEST(OutcomeExport, TabSeparatedLines) {
  const std::vector<ARRequest> reqs{{0, 0, 0, 10, 10, 16}, {1, 0, 0, 10, 10, 16}};
  std::ostringstream out;
  write_outcomes_tsv(out, simulate(reqs, ClusterConfig{16}, Policy::FF));
  EXPECT_EQ(out.str(), "id\taccepted\tstart\twait\tslowdown\n0\t1\t0\t0\t1.000000\n1\t0\t-\t-\t-\n");
}
