#pragma once

#include "arsched/availability.hpp"

namespace arsched::testing {

// Integer instantiation of the running example: t0..t10 -> 0..10 on 8 PEs.
// job1 holds PEs {0,1} over [0,3), job2 holds {2,3} over [0,1), job3 holds {4}
// over [8,10).
inline constexpr std::uint32_t kExampleN = 8;

inline PeSet pes(std::initializer_list<PeId> ids) { return PeSet(kExampleN, ids); }

inline AvailabilityCalendar example_calendar() {
  return AvailabilityCalendar::from_records(kExampleN, {{0, pes({0, 1, 2, 3})},
                                                        {1, pes({0, 1})},
                                                        {3, pes({})},
                                                        {8, pes({4})},
                                                        {10, pes({})}});
}

}  // namespace arsched::testing
