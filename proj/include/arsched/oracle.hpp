#pragma once

// Brute-force reference model of a reservation calendar: a dense boolean
// matrix busy[pe][tick]. Shares no code with AvailabilityCalendar or the
// policy selector so the two can be checked against each other.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "arsched/policies.hpp"
#include "arsched/types.hpp"

namespace arsched::oracle {

struct DenseRectangle {
  Time start = 0;
  Time t_begin = 0;
  std::optional<Time> t_end;  // nullopt: nothing reserved after the job
  std::vector<PeId> free;

  friend bool operator==(const DenseRectangle&, const DenseRectangle&) = default;
};

struct DensePlacement {
  Time start = 0;
  std::vector<PeId> pes;

  friend bool operator==(const DensePlacement&, const DensePlacement&) = default;
};

class DenseTimeline {
 public:
  static constexpr std::uint32_t kMaxPes = 64;
  static constexpr Time kMaxHorizon = 4096;

  DenseTimeline(std::uint32_t n_pes, Time horizon)
      : n_pes_(n_pes), horizon_(horizon),
        cells_(static_cast<std::size_t>(n_pes) * static_cast<std::size_t>(horizon), 0) {
    if (n_pes == 0 || n_pes > kMaxPes || horizon <= 0 || horizon > kMaxHorizon)
      throw std::invalid_argument("oracle timeline dimensions out of range");
  }

  std::uint32_t n_pes() const { return n_pes_; }
  Time horizon() const { return horizon_; }

  bool busy(PeId pe, Time t) const {
    if (t < 0 || t >= horizon_) return false;
    return cells_[index(pe, t)] != 0;
  }

  void add(Time t_s, Time t_e, const std::vector<PeId>& pes) { paint(t_s, t_e, pes, true); }
  void remove(Time t_s, Time t_e, const std::vector<PeId>& pes) { paint(t_s, t_e, pes, false); }

  std::vector<PeId> busy_column(Time t) const {
    std::vector<PeId> out;
    for (PeId p = 0; p < n_pes_; ++p)
      if (busy(p, t)) out.push_back(p);
    return out;
  }

  /// Ticks in [0, horizon] whose column differs from the previous one (the
  /// column before tick 0 is all-free).
  std::vector<Time> change_points() const {
    std::vector<Time> out;
    for (Time t = 0; t <= horizon_; ++t)
      if (busy_column(t) != busy_column(t - 1)) out.push_back(t);
    return out;
  }

  /// Run-length encoding of the columns at change points.
  std::vector<std::pair<Time, std::vector<PeId>>> records() const {
    std::vector<std::pair<Time, std::vector<PeId>>> out;
    for (Time t : change_points()) out.emplace_back(t, busy_column(t));
    return out;
  }

  std::vector<PeId> free_set(Time t_s, Time t_e) const {
    std::vector<PeId> out;
    for (PeId p = 0; p < n_pes_; ++p) {
      bool ok = true;
      for (Time t = t_s; t < t_e && ok; ++t) ok = !busy(p, t);
      if (ok) out.push_back(p);
    }
    return out;
  }

  DenseRectangle rectangle(Time t_s, Time t_du) const {
    DenseRectangle r;
    r.start = t_s;
    r.free = free_set(t_s, t_s + t_du);
    auto any_busy = [&](Time t) {
      for (PeId p : r.free)
        if (busy(p, t)) return true;
      return false;
    };
    Time b = t_s;
    while (b > 0 && !any_busy(b - 1)) --b;
    r.t_begin = b;
    for (Time t = t_s + t_du; t < horizon_; ++t) {
      if (any_busy(t)) {
        r.t_end = t;
        break;
      }
    }
    return r;
  }

  /// Change points and their t_du-shifted copies inside the window, plus
  /// the window ends.
  std::vector<Time> candidate_starts(Time t_r, Time t_du, Time t_dl) const {
    const Time latest = t_dl - t_du;
    const std::vector<Time> changes = change_points();
    std::vector<Time> out;
    for (Time t = t_r; t <= latest; ++t) {
      bool keep = t == t_r || t == latest;
      for (Time c : changes) keep = keep || c == t || c - t_du == t;
      if (keep) out.push_back(t);
    }
    return out;
  }

  /// Exhaustive admission search. With `candidates_only` the scan is limited
  /// to candidate_starts(); otherwise every integer start in the window is
  /// tried.
  std::optional<DensePlacement> find(Time t_r, Time t_du, Time t_dl, std::uint32_t n_pe,
                                     Policy policy, bool candidates_only) const {
    std::vector<Time> starts;
    if (candidates_only) {
      starts = candidate_starts(t_r, t_du, t_dl);
    } else {
      for (Time t = t_r; t <= t_dl - t_du; ++t) starts.push_back(t);
    }
    std::optional<DenseRectangle> best;
    for (Time t : starts) {
      DenseRectangle r = rectangle(t, t_du);
      if (r.free.size() < n_pe) continue;
      if (!best || better(r, *best, policy)) best = std::move(r);
    }
    if (!best) return std::nullopt;
    return DensePlacement{best->start,
                          std::vector<PeId>(best->free.begin(), best->free.begin() + n_pe)};
  }

 private:
  static double duration_of(const DenseRectangle& r) {
    return r.t_end ? static_cast<double>(*r.t_end - r.t_begin)
                   : std::numeric_limits<double>::infinity();
  }

  // Strictly better, breaking equal scores by earlier start.
  static bool better(const DenseRectangle& a, const DenseRectangle& b, Policy policy) {
    double sa = 0, sb = 0;
    bool maximize = false;
    switch (policy) {
      case Policy::FF: break;
      case Policy::PE_W: maximize = true; [[fallthrough]];
      case Policy::PE_B:
        sa = static_cast<double>(a.free.size());
        sb = static_cast<double>(b.free.size());
        break;
      case Policy::DU_W: maximize = true; [[fallthrough]];
      case Policy::DU_B:
        sa = duration_of(a);
        sb = duration_of(b);
        break;
      case Policy::PEDU_W: maximize = true; [[fallthrough]];
      case Policy::PEDU_B:
        sa = duration_of(a) * static_cast<double>(a.free.size());
        sb = duration_of(b) * static_cast<double>(b.free.size());
        break;
    }
    if (sa != sb) return maximize ? sa > sb : sa < sb;
    return a.start < b.start;
  }

  std::size_t index(PeId pe, Time t) const {
    return static_cast<std::size_t>(pe) * static_cast<std::size_t>(horizon_) +
           static_cast<std::size_t>(t);
  }

  void paint(Time t_s, Time t_e, const std::vector<PeId>& pes, bool value) {
    if (t_s < 0 || t_e > horizon_ || t_s >= t_e)
      throw std::logic_error("oracle: interval [" + std::to_string(t_s) + ", " +
                             std::to_string(t_e) + ") outside horizon");
    for (PeId p : pes) {
      if (p >= n_pes_) throw std::logic_error("oracle: PE " + std::to_string(p) + " out of range");
      for (Time t = t_s; t < t_e; ++t) {
        if ((cells_[index(p, t)] != 0) == value)
          throw std::logic_error(std::string("oracle: cell (pe=") + std::to_string(p) +
                                 ", t=" + std::to_string(t) + ") already " +
                                 (value ? "busy" : "free"));
      }
    }
    for (PeId p : pes)
      for (Time t = t_s; t < t_e; ++t) cells_[index(p, t)] = value ? 1 : 0;
  }

  std::uint32_t n_pes_;
  Time horizon_;
  std::vector<std::uint8_t> cells_;
};

}  // namespace arsched::oracle
