#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "arsched/policies.hpp"
#include "arsched/simengine.hpp"

namespace arsched {

struct RunSummary {
  Policy policy = Policy::FF;
  std::uint64_t config_fingerprint = 0;
  double acceptance_rate = 0;
  std::optional<double> avg_slowdown;  ///< absent when nothing was accepted
  std::uint64_t n_jobs = 0;
  std::uint64_t n_accepted = 0;

  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

/// Acceptance rate over all jobs; average slowdown over accepted jobs only.
inline RunSummary summarize(std::span<const JobOutcome> outcomes, Policy policy = Policy::FF,
                            std::uint64_t fingerprint = 0) {
  if (outcomes.empty()) throw PreconditionError("summarize: no outcomes");
  RunSummary s;
  s.policy = policy;
  s.config_fingerprint = fingerprint;
  s.n_jobs = outcomes.size();
  std::vector<double> slowdowns;
  for (const auto& o : outcomes) {
    if (!o.accepted) continue;
    ++s.n_accepted;
    slowdowns.push_back(o.slowdown);
  }
  s.acceptance_rate = static_cast<double>(s.n_accepted) / static_cast<double>(s.n_jobs);
  if (!slowdowns.empty()) {
    // Summing in sorted order keeps the result independent of input order.
    std::sort(slowdowns.begin(), slowdowns.end());
    double total = 0;
    for (double v : slowdowns) total += v;
    s.avg_slowdown = total / static_cast<double>(slowdowns.size());
  }
  return s;
}

struct ConfidenceInterval {
  double mean = 0;
  double half_width = 0;
};

/// Student-t interval for the mean with n-1 degrees of freedom.
inline ConfidenceInterval confidence_interval(std::span<const double> samples, double level = 0.95) {
  if (samples.size() < 2) throw PreconditionError("confidence_interval: need at least 2 samples");
  const double n = static_cast<double>(samples.size());
  double mean = 0;
  for (double v : samples) mean += v;
  mean /= n;
  double ss = 0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1));
  boost::math::students_t dist(n - 1);
  const double t = boost::math::quantile(dist, 0.5 + level / 2);
  return {mean, t * sd / std::sqrt(n)};
}

enum class AxisKind { UMed, ArrivalFactor, Flexibility };

inline std::string_view axis_name(AxisKind k) {
  switch (k) {
    case AxisKind::UMed: return "umed";
    case AxisKind::ArrivalFactor: return "af";
    case AxisKind::Flexibility: return "flex";
  }
  return "?";
}

/// One point on a sweep axis. Flexibility points carry (artime, deadline)
/// factors in (a, b); the other axes use only `a`.
struct AxisValue {
  AxisKind kind = AxisKind::UMed;
  double a = 0;
  double b = 0;

  /// "umed=7", "af=0.75", "flex=3:3".
  std::string label() const {
    char buf[64];
    if (kind == AxisKind::Flexibility)
      std::snprintf(buf, sizeof buf, "flex=%g:%g", a, b);
    else
      std::snprintf(buf, sizeof buf, "%s=%g", std::string(axis_name(kind)).c_str(), a);
    return buf;
  }

  friend bool operator<(const AxisValue& x, const AxisValue& y) {
    return std::tie(x.kind, x.a, x.b) < std::tie(y.kind, y.a, y.b);
  }
  friend bool operator==(const AxisValue&, const AxisValue&) = default;
};

struct RunRecord {
  AxisValue axis;
  Policy policy = Policy::FF;
  std::uint64_t seed = 0;
  RunSummary summary;
};

struct SweepPoint {
  AxisValue axis;
  Policy policy = Policy::FF;
  std::size_t runs = 0;
  ConfidenceInterval acceptance;
  std::optional<ConfidenceInterval> slowdown;  ///< absent with < 2 runs that accepted anything
  std::size_t absent_slowdown_runs = 0;
};

/// Mean and 95% interval per (axis value, policy), ordered by axis value
/// then canonical policy order. Every cell of the axis x policy grid must be
/// present with the same number (>= 2) of runs.
inline std::vector<SweepPoint> aggregate_sweep(std::span<const RunRecord> runs) {
  using Key = std::pair<AxisValue, std::size_t>;
  std::map<Key, std::vector<const RunRecord*>> groups;
  std::vector<AxisValue> axes;
  std::vector<Policy> policies;
  for (const auto& r : runs) {
    groups[{r.axis, policy_rank(r.policy)}].push_back(&r);
    if (std::find(axes.begin(), axes.end(), r.axis) == axes.end()) axes.push_back(r.axis);
    if (std::find(policies.begin(), policies.end(), r.policy) == policies.end())
      policies.push_back(r.policy);
  }
  if (groups.empty()) throw PreconditionError("aggregate_sweep: no runs");

  const std::size_t expected = groups.begin()->second.size();
  for (const auto& axis : axes) {
    for (Policy p : policies) {
      const std::string cell = axis.label() + "/" + std::string(policy_name(p));
      auto it = groups.find({axis, policy_rank(p)});
      if (it == groups.end()) throw PreconditionError("aggregate_sweep: missing cell " + cell);
      if (it->second.size() < 2)
        throw PreconditionError("aggregate_sweep: cell " + cell + " has fewer than 2 seeds");
      if (it->second.size() != expected)
        throw PreconditionError("aggregate_sweep: cell " + cell + " has " +
                                std::to_string(it->second.size()) + " runs, expected " +
                                std::to_string(expected));
    }
  }

  std::vector<SweepPoint> out;
  for (const auto& [key, members] : groups) {
    SweepPoint pt;
    pt.axis = key.first;
    pt.policy = members.front()->policy;
    pt.runs = members.size();
    std::vector<double> acc, slow;
    for (const RunRecord* r : members) {
      acc.push_back(r->summary.acceptance_rate);
      if (r->summary.avg_slowdown)
        slow.push_back(*r->summary.avg_slowdown);
      else
        ++pt.absent_slowdown_runs;
    }
    pt.acceptance = confidence_interval(acc);
    if (slow.size() >= 2) pt.slowdown = confidence_interval(slow);
    out.push_back(pt);
  }
  return out;
}

namespace detail {
inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}
}  // namespace detail

inline constexpr const char* kRunsHeader = "axis,policy,seed,acceptance_rate,avg_slowdown,n_jobs,n_accepted";
inline constexpr const char* kSweepHeader = "axis,policy,metric,mean,ci95";

/// Rows in the order given; an absent slowdown is an empty field.
inline void write_runs_csv(std::ostream& out, std::span<const RunRecord> runs) {
  out << kRunsHeader << '\n';
  for (const auto& r : runs) {
    out << r.axis.label() << ',' << policy_name(r.policy) << ',' << r.seed << ','
        << detail::fixed6(r.summary.acceptance_rate) << ','
        << (r.summary.avg_slowdown ? detail::fixed6(*r.summary.avg_slowdown) : "") << ','
        << r.summary.n_jobs << ',' << r.summary.n_accepted << '\n';
  }
}

inline void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> points) {
  out << kSweepHeader << '\n';
  for (const auto& p : points) {
    const std::string prefix = p.axis.label() + "," + std::string(policy_name(p.policy)) + ",";
    out << prefix << "acceptance_rate," << detail::fixed6(p.acceptance.mean) << ','
        << detail::fixed6(p.acceptance.half_width) << '\n';
    out << prefix << "avg_slowdown,";
    if (p.slowdown)
      out << detail::fixed6(p.slowdown->mean) << ',' << detail::fixed6(p.slowdown->half_width);
    else
      out << ',';
    out << '\n';
  }
}

}  // namespace arsched
