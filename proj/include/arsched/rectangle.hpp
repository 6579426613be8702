#pragma once

#include <compare>
#include <cstdint>

#include "arsched/pe_set.hpp"
#include "arsched/types.hpp"

namespace arsched {

/// A feasible start time together with the largest time span over which its
/// free-PE set stays entirely unreserved.
struct AvailabilityRectangle {
  Time start = 0;
  Time t_begin = 0;
  Time t_end = kOpenEnd;  ///< kOpenEnd when no later reservation touches `free`
  PeSet free;

  bool open() const { return t_end == kOpenEnd; }

  friend bool operator==(const AvailabilityRectangle&, const AvailabilityRectangle&) = default;
};

/// Non-negative quantity that may be unbounded. Unbounded compares greater
/// than any finite value and equal to another unbounded one.
struct Extent {
  bool unbounded = false;
  std::int64_t value = 0;

  static Extent infinite() { return {true, 0}; }
  static Extent finite(std::int64_t v) { return {false, v}; }

  friend std::strong_ordering operator<=>(const Extent& a, const Extent& b) {
    if (a.unbounded || b.unbounded) return a.unbounded <=> b.unbounded;
    return a.value <=> b.value;
  }
  friend bool operator==(const Extent& a, const Extent& b) { return (a <=> b) == 0; }
};

/// Scoring view of a rectangle used by the placement policies.
struct RectangleScore {
  std::uint32_t pe_count = 0;
  Extent duration;
  Extent area;
  Time start = 0;

  static RectangleScore of(const AvailabilityRectangle& r) {
    RectangleScore s;
    s.pe_count = r.free.count();
    s.start = r.start;
    if (r.open()) {
      s.duration = Extent::infinite();
      s.area = Extent::infinite();
    } else {
      const std::int64_t d = r.t_end - r.t_begin;
      s.duration = Extent::finite(d);
      s.area = Extent::finite(d * static_cast<std::int64_t>(s.pe_count));
    }
    return s;
  }
};

}  // namespace arsched
