#pragma once

#include <array>
#include <compare>
#include <span>
#include <string>
#include <string_view>

#include "arsched/rectangle.hpp"
#include "arsched/types.hpp"

namespace arsched {

/// Placement strategies for choosing among feasible availability rectangles.
///   FF      earliest start
///   PE_B    fewest free PEs        PE_W    most free PEs
///   DU_B    shortest rectangle     DU_W    longest rectangle
///   PEDU_B  smallest PEs*duration  PEDU_W  largest PEs*duration
/// All ties go to the earliest start.
enum class Policy { FF, PE_B, DU_B, PEDU_B, PE_W, DU_W, PEDU_W };

inline constexpr std::array<Policy, 7> kAllPolicies = {
    Policy::FF,   Policy::PE_B, Policy::DU_B,  Policy::PEDU_B,
    Policy::PE_W, Policy::DU_W, Policy::PEDU_W};

inline std::string_view policy_name(Policy p) {
  switch (p) {
    case Policy::FF: return "ff";
    case Policy::PE_B: return "pe_b";
    case Policy::DU_B: return "du_b";
    case Policy::PEDU_B: return "pedu_b";
    case Policy::PE_W: return "pe_w";
    case Policy::DU_W: return "du_w";
    case Policy::PEDU_W: return "pedu_w";
  }
  return "?";
}

/// Position in kAllPolicies; used for canonical output ordering.
inline std::size_t policy_rank(Policy p) { return static_cast<std::size_t>(p); }

inline Policy parse_policy(std::string_view name) {
  for (Policy p : kAllPolicies)
    if (policy_name(p) == name) return p;
  throw ConfigError("unknown policy '" + std::string(name) +
                    "' (expected one of ff, pe_b, du_b, pedu_b, pe_w, du_w, pedu_w)");
}

namespace detail {

// Negative when `a` beats `b` on the policy's primary criterion.
inline std::strong_ordering compare_primary(const RectangleScore& a, const RectangleScore& b,
                                            Policy policy) {
  switch (policy) {
    case Policy::FF: return std::strong_ordering::equal;
    case Policy::PE_B: return a.pe_count <=> b.pe_count;
    case Policy::PE_W: return b.pe_count <=> a.pe_count;
    case Policy::DU_B: return a.duration <=> b.duration;
    case Policy::DU_W: return b.duration <=> a.duration;
    case Policy::PEDU_B: return a.area <=> b.area;
    case Policy::PEDU_W: return b.area <=> a.area;
  }
  return std::strong_ordering::equal;
}

}  // namespace detail

/// True when `a` is preferred over `b` under `policy`.
inline bool prefers(const RectangleScore& a, const RectangleScore& b, Policy policy) {
  const auto primary = detail::compare_primary(a, b, policy);
  if (primary != 0) return primary < 0;
  return a.start < b.start;
}

/// Index of the rectangle chosen by `policy`. Scans the whole list, so the
/// result does not depend on input order.
inline std::size_t select_index(std::span<const AvailabilityRectangle> rects, Policy policy) {
  if (rects.empty()) throw PreconditionError("select: empty rectangle list");
  std::size_t best = 0;
  RectangleScore best_score = RectangleScore::of(rects[0]);
  for (std::size_t i = 1; i < rects.size(); ++i) {
    RectangleScore s = RectangleScore::of(rects[i]);
    if (prefers(s, best_score, policy)) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

inline const AvailabilityRectangle& select(std::span<const AvailabilityRectangle> rects,
                                           Policy policy) {
  return rects[select_index(rects, policy)];
}

}  // namespace arsched
