#pragma once

// Randomized differential checks of AvailabilityCalendar against the dense
// oracle on small clusters. Used by `arsched validate` and the test suites.

#include <chrono>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "arsched/availability.hpp"
#include "arsched/oracle.hpp"
#include "arsched/workload.hpp"

namespace arsched::validation {

struct Report {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;
  double seconds = 0;
  /// Queries the calendar rejected although the oracle found a placement at
  /// a start outside the candidate set.
  std::size_t missed_by_candidates = 0;
  std::size_t rejected = 0;

  bool ok() const { return failures == 0; }

  void fail(const std::string& what) {
    if (failures++ == 0) first_failure = what;
  }
};

inline PeSet to_pe_set(std::uint32_t n, const std::vector<PeId>& ids) {
  PeSet s(n);
  for (PeId id : ids) s.insert(id);
  return s;
}

/// Calendar records as (time, ids) pairs, comparable with DenseTimeline::records().
inline std::vector<std::pair<Time, std::vector<PeId>>> record_view(const AvailabilityCalendar& cal) {
  std::vector<std::pair<Time, std::vector<PeId>>> out;
  for (const auto& r : cal.records()) out.emplace_back(r.time, r.busy.ids());
  return out;
}

struct Booking {
  Time t_s, t_e;
  std::vector<PeId> pes;
};

/// Random valid allocation drawn against the oracle's current state, or
/// nothing if the drawn interval has no free PE.
inline std::optional<Booking> random_booking(const oracle::DenseTimeline& tl, Rng& rng, Time max_len) {
  const Time t_s = rng.uniform_int(0, tl.horizon() - 2);
  const Time t_e = std::min(tl.horizon() - 1, t_s + rng.uniform_int(1, max_len));
  const auto free = tl.free_set(t_s, t_e);
  if (free.empty()) return std::nullopt;
  Booking b{t_s, t_e, {}};
  for (PeId p : free)
    if (rng.uniform01() < 0.4) b.pes.push_back(p);
  if (b.pes.empty()) b.pes.push_back(free[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(free.size()) - 1))]);
  return b;
}

inline std::string describe(const std::string& what, std::size_t seq, std::size_t step) {
  std::ostringstream os;
  os << what << " (sequence " << seq << ", step " << step << ")";
  return os.str();
}

/// Random add/delete sequences; after every step the calendar's records,
/// free sets and maximal rectangles must equal the oracle's.
inline Report oracle_equivalence(std::size_t sequences, std::uint64_t seed, std::size_t steps = 40) {
  const auto t0 = std::chrono::steady_clock::now();
  Report rep;
  rep.name = "oracle equivalence";
  Rng rng(seed);
  for (std::size_t seq = 0; seq < sequences; ++seq) {
    const auto n = static_cast<std::uint32_t>(rng.uniform_int(1, 16));
    const Time horizon = rng.uniform_int(16, 256);
    oracle::DenseTimeline tl(n, horizon);
    AvailabilityCalendar cal(n);
    std::vector<Booking> live;
    for (std::size_t step = 0; step < steps; ++step) {
      ++rep.cases;
      const bool do_delete = !live.empty() && rng.uniform01() < 0.35;
      try {
        if (do_delete) {
          const auto idx = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(live.size()) - 1));
          const Booking b = live[idx];
          live.erase(live.begin() + static_cast<std::ptrdiff_t>(idx));
          tl.remove(b.t_s, b.t_e, b.pes);
          cal.delete_allocation(b.t_s, b.t_e, to_pe_set(n, b.pes));
        } else if (auto b = random_booking(tl, rng, horizon / 3 + 1)) {
          tl.add(b->t_s, b->t_e, b->pes);
          cal.add_allocation(b->t_s, b->t_e, to_pe_set(n, b->pes));
          live.push_back(*b);
        }
      } catch (const std::exception& e) {
        rep.fail(describe(std::string("mutation threw: ") + e.what(), seq, step));
        break;
      }
      if (auto err = cal.check_invariants()) rep.fail(describe("invariant: " + *err, seq, step));
      if (record_view(cal) != tl.records()) rep.fail(describe("records differ", seq, step));

      const Time a = rng.uniform_int(0, horizon - 2);
      const Time b = rng.uniform_int(a + 1, horizon - 1);
      if (cal.free_pes(a, b).ids() != tl.free_set(a, b))
        rep.fail(describe("free_pes differ on [" + std::to_string(a) + "," + std::to_string(b) + ")", seq, step));

      const auto got = cal.max_rectangle(a, b - a);
      const auto want = tl.rectangle(a, b - a);
      const bool same = got.start == want.start && got.t_begin == want.t_begin &&
                        (want.t_end ? got.t_end == *want.t_end : got.open()) && got.free.ids() == want.free;
      if (!same) rep.fail(describe("max_rectangle differs at start " + std::to_string(a), seq, step));
    }
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

/// Random admission queries on random small calendars: find_allocation must
/// match the oracle's exhaustive search over candidate starts, for `policy`.
inline Report admission_equivalence(Policy policy, std::size_t queries, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  Report rep;
  rep.name = "admission equivalence (" + std::string(policy_name(policy)) + ")";
  Rng rng(seed);
  for (std::size_t q = 0; q < queries; ++q) {
    ++rep.cases;
    const auto n = static_cast<std::uint32_t>(rng.uniform_int(1, 16));
    const Time horizon = rng.uniform_int(32, 256);
    oracle::DenseTimeline tl(n, horizon);
    AvailabilityCalendar cal(n);
    const auto bookings = rng.uniform_int(0, 12);
    for (std::int64_t k = 0; k < bookings; ++k) {
      if (auto b = random_booking(tl, rng, horizon / 4 + 1)) {
        tl.add(b->t_s, b->t_e, b->pes);
        cal.add_allocation(b->t_s, b->t_e, to_pe_set(n, b->pes));
      }
    }
    const Time t_du = rng.uniform_int(1, horizon / 4);
    const Time t_r = rng.uniform_int(0, horizon - 1 - t_du);
    const Time t_dl = rng.uniform_int(t_r + t_du, horizon - 1);
    const auto n_pe = static_cast<std::uint32_t>(rng.uniform_int(1, n));

    const AvailabilityCalendar before = cal;
    const auto got = cal.find_allocation(t_r, t_du, t_dl, n_pe, policy);
    const auto want = tl.find(t_r, t_du, t_dl, n_pe, policy, true);
    const std::string where = "query " + std::to_string(q);
    if (!(cal == before)) rep.fail(where + ": find_allocation modified the calendar");
    if (got.has_value() != want.has_value()) {
      rep.fail(where + ": accept/reject differs");
      continue;
    }
    if (!got) {
      ++rep.rejected;
      if (tl.find(t_r, t_du, t_dl, n_pe, policy, false)) ++rep.missed_by_candidates;
      continue;
    }
    if (got->start != want->start) rep.fail(where + ": start differs");
    if (got->pes.ids() != want->pes) rep.fail(where + ": PE choice differs");
    if (got->start < t_r || got->start + t_du > t_dl) rep.fail(where + ": start outside window");
    if (!got->pes.is_subset_of(to_pe_set(n, tl.free_set(got->start, got->start + t_du))))
      rep.fail(where + ": chose busy PEs");
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace arsched::validation
