#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <functional>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "arsched/availability.hpp"
#include "arsched/policies.hpp"
#include "arsched/workload.hpp"

namespace arsched {

struct JobOutcome {
  ARRequest request;
  bool accepted = false;
  Time start = 0;  // meaningful only when accepted
  PeSet pes;
  Time wait = 0;
  double slowdown = 0;

  friend bool operator==(const JobOutcome&, const JobOutcome&) = default;
};

/// Sees every admission decision together with the calendar it was made on.
using AdmissionObserver =
    std::function<void(const AvailabilityCalendar&, const ARRequest&, const std::optional<Placement>&)>;

/// Single-threaded event loop: arrivals are admitted or rejected once, on
/// receipt; accepted jobs are committed to the calendar immediately and
/// released at their completion. Completions are handled before arrivals
/// that share their timestamp.
class Simulator {
 public:
  Simulator(ClusterConfig cluster, Policy policy)
      : cluster_(cluster), policy_(policy), calendar_(cluster.n_pes) {}

  void set_observer(AdmissionObserver observer) { observer_ = std::move(observer); }

  /// With `drain` false the reservations still pending after the last
  /// arrival stay in calendar().
  std::vector<JobOutcome> run(std::span<const ARRequest> requests, bool drain = true) {
    std::vector<JobOutcome> outcomes;
    outcomes.reserve(requests.size());
    Time now = 0;
    for (const ARRequest& req : requests) {
      if (req.t_a < now)
        throw PreconditionError("requests not sorted by arrival at id " + std::to_string(req.id));
      if (!req.valid() || req.n_pe > cluster_.n_pes)
        throw PreconditionError("invalid request id " + std::to_string(req.id));
      now = req.t_a;
      drain_until(now);
      outcomes.push_back(admit(req));
    }
    if (drain) drain_until(kOpenEnd);
    return outcomes;
  }

  const AvailabilityCalendar& calendar() const { return calendar_; }

 private:
  struct Completion {
    Time time;
    std::uint64_t seq;
    Time start;
    PeSet pes;

    bool operator>(const Completion& o) const {
      return time != o.time ? time > o.time : seq > o.seq;
    }
  };

  JobOutcome admit(const ARRequest& req) {
    JobOutcome out;
    out.request = req;
    std::optional<Placement> placement =
        calendar_.find_allocation(req.t_r, req.t_du, req.t_dl, req.n_pe, policy_);
    if (observer_) observer_(calendar_, req, placement);
    if (!placement) return out;

    const Time end = placement->start + req.t_du;
    if (placement->start < req.t_r || end > req.t_dl)
      throw InvariantError("engine: placement for id " + std::to_string(req.id) +
                           " violates its window");
    try {
      calendar_.add_allocation(placement->start, end, placement->pes);
    } catch (const InvariantError& e) {
      throw InvariantError("engine: committing id " + std::to_string(req.id) + ": " + e.what());
    }
    out.accepted = true;
    out.start = placement->start;
    out.pes = std::move(placement->pes);
    out.wait = out.start - req.t_r;
    out.slowdown = static_cast<double>(out.wait + req.t_du) / static_cast<double>(req.t_du);
    pending_.push(Completion{end, next_seq_++, out.start, out.pes});
    return out;
  }

  void drain_until(Time t) {
    while (!pending_.empty() && pending_.top().time <= t) {
      const Completion c = pending_.top();
      pending_.pop();
      try {
        calendar_.delete_allocation(c.start, c.time, c.pes);
      } catch (const InvariantError& e) {
        throw InvariantError("engine: releasing job at t=" + std::to_string(c.time) + ": " + e.what());
      }
    }
  }

  ClusterConfig cluster_;
  Policy policy_;
  AvailabilityCalendar calendar_;
  AdmissionObserver observer_;
  std::priority_queue<Completion, std::vector<Completion>, std::greater<>> pending_;
  std::uint64_t next_seq_ = 0;
};

inline std::vector<JobOutcome> simulate(std::span<const ARRequest> requests, ClusterConfig cluster,
                                        Policy policy) {
  Simulator sim(cluster, policy);
  return sim.run(requests);
}

/// "id accepted start wait slowdown", tab-separated; rejected jobs carry "-".
inline void write_outcomes_tsv(std::ostream& out, const std::vector<JobOutcome>& outcomes) {
  out << "id\taccepted\tstart\twait\tslowdown\n";
  char buf[64];
  for (const auto& o : outcomes) {
    out << o.request.id << '\t' << (o.accepted ? 1 : 0) << '\t';
    if (o.accepted) {
      std::snprintf(buf, sizeof buf, "%.6f", o.slowdown);
      out << o.start << '\t' << o.wait << '\t' << buf << '\n';
    } else {
      out << "-\t-\t-\n";
    }
  }
}

}  // namespace arsched
