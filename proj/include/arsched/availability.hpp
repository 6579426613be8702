#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "arsched/pe_set.hpp"
#include "arsched/policies.hpp"
#include "arsched/rectangle.hpp"
#include "arsched/types.hpp"

namespace arsched {

/// Occupancy change point: from `time` until the next record, exactly the PEs
/// in `busy` are reserved. An empty set on a non-head record releases every PE
/// of the previous slot.
struct SlotRecord {
  Time time = 0;
  PeSet busy;

  friend bool operator==(const SlotRecord&, const SlotRecord&) = default;
};

/// Admission decision: where a request should run.
struct Placement {
  Time start = 0;
  PeSet pes;

  friend bool operator==(const Placement&, const Placement&) = default;
};

/// Candidate start times for a request with window [t_r, t_dl - t_du], given
/// the sorted change-point times of a calendar: the window ends, every change
/// point inside the window, and every change point shifted back by t_du that
/// lands inside the window. Sorted and deduplicated.
inline std::vector<Time> candidate_start_times(std::span<const Time> times, Time t_r, Time t_du,
                                               Time t_dl) {
  if (t_r + t_du > t_dl)
    throw PreconditionError("empty scheduling window: t_r + t_du > t_dl");
  const Time latest = t_dl - t_du;
  std::vector<Time> out{t_r, latest};
  for (Time t : times) {
    if (t >= t_r && t <= latest) out.push_back(t);
    const Time shifted = t - t_du;
    if (shifted >= t_r && shifted <= latest) out.push_back(shifted);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Reservation calendar of a homogeneous cluster, kept as a time-sorted
/// array of slot records.
///
/// Invariants (checked by check_invariants()):
///   - record times strictly increase;
///   - consecutive records never carry equal busy sets;
///   - the head record is non-empty and the tail record is empty;
///   - busy sets stay within [0, n_pes).
/// The set of change-point times is the key projection of the records, so
/// it can never drift out of sync with them.
class AvailabilityCalendar {
 public:
  explicit AvailabilityCalendar(std::uint32_t n_pes) : n_pes_(n_pes) {
    if (n_pes == 0) throw ConfigError("cluster must have at least one PE");
  }

  /// Builds a calendar from explicit records; throws InvariantError when they
  /// do not form a valid calendar.
  static AvailabilityCalendar from_records(std::uint32_t n_pes, std::vector<SlotRecord> records) {
    AvailabilityCalendar cal(n_pes);
    cal.records_ = std::move(records);
    if (auto err = cal.check_invariants()) throw InvariantError("invalid calendar: " + *err);
    return cal;
  }

  std::uint32_t n_pes() const { return n_pes_; }
  bool empty() const { return records_.empty(); }
  std::size_t size() const { return records_.size(); }
  const std::vector<SlotRecord>& records() const { return records_; }

  std::vector<Time> time_set() const {
    std::vector<Time> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(r.time);
    return out;
  }

  PeSet busy_at(Time t) const {
    const auto idx = covering(t);
    return idx ? records_[*idx].busy : PeSet(n_pes_);
  }

  /// Reserves `pes` over [t_s, t_e). Throws OverlapError, leaving the
  /// calendar untouched, if any of them is already reserved in that interval.
  void add_allocation(Time t_s, Time t_e, const PeSet& pes) {
    check_interval(t_s, t_e, pes);
    const PeSet taken = union_busy(t_s, t_e);
    if (taken.intersects(pes)) {
      std::ostringstream msg;
      msg << "add_allocation [" << t_s << ", " << t_e << ") PEs {" << (taken & pes).to_string()
          << "} already reserved";
      throw OverlapError(msg.str());
    }
    split_at(t_s);
    split_at(t_e);
    for (auto& r : records_in(t_s, t_e)) r.busy |= pes;
    clean();
  }

  /// Releases `pes` over [t_s, t_e). Throws NotPresentError, leaving the
  /// calendar untouched, unless every one of them is reserved throughout.
  void delete_allocation(Time t_s, Time t_e, const PeSet& pes) {
    check_interval(t_s, t_e, pes);
    if (!reserved_throughout(t_s, t_e, pes)) {
      std::ostringstream msg;
      msg << "delete_allocation [" << t_s << ", " << t_e << ") PEs {" << pes.to_string()
          << "} not reserved throughout";
      throw NotPresentError(msg.str());
    }
    split_at(t_s);
    split_at(t_e);
    for (auto& r : records_in(t_s, t_e)) r.busy -= pes;
    clean();
  }

  std::vector<Time> candidate_start_times(Time t_r, Time t_du, Time t_dl) const {
    const auto times = time_set();
    return arsched::candidate_start_times(times, t_r, t_du, t_dl);
  }

  /// PEs unreserved throughout [t_s, t_e).
  PeSet free_pes(Time t_s, Time t_e) const {
    if (t_s >= t_e) throw PreconditionError("free_pes: empty interval");
    return union_busy(t_s, t_e).complement();
  }

  /// Maximal rectangle around [t_s, t_s + t_du) for the PEs free there.
  AvailabilityRectangle max_rectangle(Time t_s, Time t_du) const {
    return rectangle_for(t_s, t_du, free_pes(t_s, t_s + t_du));
  }

  /// Rectangles of every candidate start that offers at least `n_pe` free PEs,
  /// in ascending start order.
  std::vector<AvailabilityRectangle> feasible_rectangles(Time t_r, Time t_du, Time t_dl,
                                                         std::uint32_t n_pe) const {
    std::vector<AvailabilityRectangle> rects;
    for (Time t_s : candidate_start_times(t_r, t_du, t_dl)) {
      PeSet free = free_pes(t_s, t_s + t_du);
      if (free.count() >= n_pe) rects.push_back(rectangle_for(t_s, t_du, std::move(free)));
    }
    return rects;
  }

  /// Admission search. Returns the start time and the `n_pe` lowest-id PEs of
  /// the rectangle picked by `policy`, or nothing if no candidate start fits.
  /// Never modifies the calendar.
  std::optional<Placement> find_allocation(Time t_r, Time t_du, Time t_dl, std::uint32_t n_pe,
                                           Policy policy) const {
    if (t_r < 0 || t_du <= 0) throw PreconditionError("find_allocation: bad ready time or duration");
    if (t_r + t_du > t_dl) throw PreconditionError("find_allocation: t_r + t_du > t_dl");
    if (n_pe == 0 || n_pe > n_pes_)
      throw PreconditionError("find_allocation: n_pe outside [1, " + std::to_string(n_pes_) + "]");
    if (records_.empty()) return Placement{t_r, PeSet::prefix(n_pes_, n_pe)};

    const auto rects = feasible_rectangles(t_r, t_du, t_dl, n_pe);
    if (rects.empty()) return std::nullopt;
    const auto& chosen = select(rects, policy);
    return Placement{chosen.start, chosen.free.lowest(n_pe)};
  }

  /// Description of the first violated invariant, if any.
  std::optional<std::string> check_invariants() const {
    for (std::size_t i = 0; i < records_.size(); ++i) {
      const auto& r = records_[i];
      const std::string where = "record " + std::to_string(i) + " (t=" + std::to_string(r.time) + ")";
      if (r.busy.universe() != n_pes_) return where + ": PE set universe mismatch";
      if (r.time < 0) return where + ": negative time";
      if (i > 0 && records_[i - 1].time >= r.time) return where + ": times not strictly increasing";
      if (i == 0 && r.busy.empty()) return where + ": empty head record";
      if (i > 0 && records_[i - 1].busy == r.busy) return where + ": equal to predecessor";
    }
    if (!records_.empty() && !records_.back().busy.empty()) return "tail record is not empty";
    return std::nullopt;
  }

  /// One "time<TAB>ids" line per record, ascending.
  std::string dump() const {
    std::string out;
    for (const auto& r : records_) {
      out += std::to_string(r.time);
      out += '\t';
      out += r.busy.to_string();
      out += '\n';
    }
    return out;
  }

  friend bool operator==(const AvailabilityCalendar&, const AvailabilityCalendar&) = default;

 private:
  // Index of the last record with time <= t.
  std::optional<std::size_t> covering(Time t) const {
    auto it = std::upper_bound(records_.begin(), records_.end(), t,
                               [](Time v, const SlotRecord& r) { return v < r.time; });
    if (it == records_.begin()) return std::nullopt;
    return static_cast<std::size_t>(it - records_.begin() - 1);
  }

  std::size_t lower_index(Time t) const {
    auto it = std::lower_bound(records_.begin(), records_.end(), t,
                               [](const SlotRecord& r, Time v) { return r.time < v; });
    return static_cast<std::size_t>(it - records_.begin());
  }

  // Union of busy sets over every instant of [t_s, t_e).
  PeSet union_busy(Time t_s, Time t_e) const {
    PeSet acc(n_pes_);
    const auto first = covering(t_s);
    std::size_t i = first ? *first : lower_index(t_s);
    for (; i < records_.size() && records_[i].time < t_e; ++i) acc |= records_[i].busy;
    return acc;
  }

  bool reserved_throughout(Time t_s, Time t_e, const PeSet& pes) const {
    const auto first = covering(t_s);
    if (!first) return false;
    for (std::size_t i = *first; i < records_.size() && records_[i].time < t_e; ++i)
      if (!pes.is_subset_of(records_[i].busy)) return false;
    return true;
  }

  std::span<SlotRecord> records_in(Time t_s, Time t_e) {
    const std::size_t lo = lower_index(t_s);
    const std::size_t hi = lower_index(t_e);
    return std::span<SlotRecord>(records_).subspan(lo, hi - lo);
  }

  // Ensures a record exists at t carrying the occupancy already in force there.
  void split_at(Time t) {
    const std::size_t pos = lower_index(t);
    if (pos < records_.size() && records_[pos].time == t) return;
    PeSet busy = pos > 0 ? records_[pos - 1].busy : PeSet(n_pes_);
    records_.insert(records_.begin() + static_cast<std::ptrdiff_t>(pos), SlotRecord{t, std::move(busy)});
  }

  // Drops an empty head record and any record equal to its predecessor.
  void clean() {
    std::size_t out = 0;
    for (std::size_t i = 0; i < records_.size(); ++i) {
      const bool redundant =
          out == 0 ? records_[i].busy.empty() : records_[i].busy == records_[out - 1].busy;
      if (redundant) continue;
      if (out != i) records_[out] = std::move(records_[i]);
      ++out;
    }
    records_.resize(out);
  }

  AvailabilityRectangle rectangle_for(Time t_s, Time t_du, PeSet free) const {
    AvailabilityRectangle rect;
    rect.start = t_s;
    rect.t_begin = 0;
    if (const auto idx = covering(t_s)) {
      // Walk back until a record reserves one of the free PEs.
      for (std::size_t j = *idx + 1; j-- > 0;) {
        if (records_[j].busy.intersects(free)) {
          rect.t_begin = j == *idx ? t_s : records_[j + 1].time;
          break;
        }
      }
    }
    rect.t_end = kOpenEnd;
    for (std::size_t k = lower_index(t_s + t_du); k < records_.size(); ++k) {
      if (records_[k].busy.intersects(free)) {
        rect.t_end = records_[k].time;
        break;
      }
    }
    rect.free = std::move(free);
    return rect;
  }

  void check_interval(Time t_s, Time t_e, const PeSet& pes) const {
    if (t_s < 0 || t_s >= t_e) throw PreconditionError("allocation interval must satisfy 0 <= t_s < t_e");
    if (pes.universe() != n_pes_) throw PreconditionError("PE set built for a different cluster size");
    if (pes.empty()) throw PreconditionError("allocation needs at least one PE");
  }

  std::uint32_t n_pes_;
  std::vector<SlotRecord> records_;
};

}  // namespace arsched
