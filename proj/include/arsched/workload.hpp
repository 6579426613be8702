#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "arsched/types.hpp"

namespace arsched {

/// Advance-reservation request (t_a, t_r, t_du, t_dl, n_pe).
struct ARRequest {
  std::uint64_t id = 0;
  Time t_a = 0;   ///< arrival
  Time t_r = 0;   ///< ready (earliest start)
  Time t_du = 0;  ///< duration
  Time t_dl = 0;  ///< deadline (latest completion)
  std::uint32_t n_pe = 1;

  bool valid() const { return t_a >= 0 && t_r >= t_a && t_du > 0 && t_dl >= t_r + t_du && n_pe >= 1; }

  friend bool operator==(const ARRequest&, const ARRequest&) = default;
};

/// Random stream for workload generation. Uniform draws are built directly
/// from the 64-bit engine output so sequences are identical across standard
/// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<double>(hi - lo + 1);
    return std::min(hi, lo + static_cast<std::int64_t>(uniform01() * span));
  }

  double exponential(double mean) { return -mean * std::log1p(-uniform01()); }

  /// Index drawn according to non-negative `weights` (need not be normalized).
  std::size_t discrete(const std::vector<double>& weights) {
    double total = 0;
    for (double w : weights) total += w;
    const double u = uniform01() * total;
    double acc = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc && weights[i] > 0) return i;
    }
    for (std::size_t i = weights.size(); i-- > 0;)
      if (weights[i] > 0) return i;
    return 0;
  }

 private:
  std::mt19937_64 engine_;
};

struct WorkloadConfig {
  std::uint64_t job_count = 10000;
  double u_low = 4.5;
  double u_med = 7.0;
  double u_hi = 10.0;
  double u_prob = 0.82;
  std::vector<Time> runtime_values{60, 300, 900, 1800, 3600, 10800};
  /// Not fitted values; only the trends built on top of them are meaningful.
  std::vector<double> runtime_weights{0.15, 0.20, 0.20, 0.20, 0.15, 0.10};
  /// Jobs of size >= 2^u_med draw runtimes from the weights shifted one slot
  /// toward longer values.
  bool size_runtime_correlation = true;
  double artime_factor = 3.0;
  double deadline_factor = 3.0;
  double arrival_factor = 1.0;
  /// Mean of the exponential inter-arrival process before arrival_factor.
  double mean_interarrival = 400.0;
  std::uint64_t seed = 1;

  /// Throws ConfigError naming the first offending field.
  void validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
      throw ConfigError("workload." + field + ": " + why);
    };
    if (!(u_low < u_med)) fail("u_med", "must exceed u_low");
    if (!(u_med < u_hi)) fail("u_hi", "must exceed u_med");
    if (!(u_prob >= 0 && u_prob <= 1)) fail("u_prob", "must lie in [0, 1]");
    if (runtime_values.empty()) fail("runtime_values", "must not be empty");
    for (Time v : runtime_values)
      if (v <= 0) fail("runtime_values", "must be positive");
    if (runtime_weights.size() != runtime_values.size())
      fail("runtime_weights", "needs one weight per runtime value");
    double total = 0;
    for (double w : runtime_weights) {
      if (!(w >= 0)) fail("runtime_weights", "must be non-negative");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) fail("runtime_weights", "must sum to 1");
    if (!(artime_factor >= 0)) fail("artime_factor", "must be >= 0");
    if (!(deadline_factor >= 0)) fail("deadline_factor", "must be >= 0");
    if (!(arrival_factor > 0)) fail("arrival_factor", "must be > 0");
    if (!(mean_interarrival > 0)) fail("mean_interarrival", "must be > 0");
  }
};

inline constexpr std::uint32_t kMinJobSize = 32;
inline constexpr std::uint32_t kMaxJobSize = 1024;

/// Two-stage uniform over log2(size): [u_low, u_med] with probability u_prob,
/// otherwise [u_med, u_hi]; rounded to the nearest integer exponent and
/// clamped to [32, 1024].
inline std::uint32_t sample_size(const WorkloadConfig& cfg, Rng& rng) {
  const bool low_stage = rng.uniform01() < cfg.u_prob;
  const double x = low_stage ? rng.uniform(cfg.u_low, cfg.u_med) : rng.uniform(cfg.u_med, cfg.u_hi);
  const double e = std::clamp(std::round(x), 5.0, 10.0);
  return std::uint32_t{1} << static_cast<unsigned>(e);
}

/// Runtime weights in force for a job of the given size.
inline std::vector<double> runtime_weights_for(const WorkloadConfig& cfg, std::uint32_t n_pe) {
  std::vector<double> w = cfg.runtime_weights;
  if (cfg.size_runtime_correlation && w.size() > 1 &&
      static_cast<double>(n_pe) >= std::exp2(cfg.u_med)) {
    const double tail = w.back();
    std::rotate(w.rbegin(), w.rbegin() + 1, w.rend());
    w.back() += tail;
    w.front() = 0;
  }
  return w;
}

inline Time sample_runtime(const WorkloadConfig& cfg, std::uint32_t n_pe, Rng& rng) {
  return cfg.runtime_values[rng.discrete(runtime_weights_for(cfg, n_pe))];
}

struct ReadyAndDeadline {
  Time t_r = 0;
  Time t_dl = 0;
};

/// Ready time and deadline from the two uniform draws u1 (book-ahead) and
/// u2 (deadline slack).
inline ReadyAndDeadline derive_ar_fields(Time t_a, Time t_du, double artime_factor,
                                         double deadline_factor, double u1, double u2) {
  ReadyAndDeadline out;
  out.t_r = t_a + std::llround(artime_factor * u1 * static_cast<double>(t_du));
  out.t_dl = out.t_r + std::llround((1.0 + deadline_factor * u2) * static_cast<double>(t_du));
  return out;
}

inline ReadyAndDeadline derive_ar_fields(Time t_a, Time t_du, double artime_factor,
                                         double deadline_factor, Rng& rng) {
  const double u1 = rng.uniform01();
  const double u2 = rng.uniform01();
  return derive_ar_fields(t_a, t_du, artime_factor, deadline_factor, u1, u2);
}

/// Compresses (factor > 1) or stretches (factor < 1) arrival times; ready
/// times and deadlines keep their offsets from the arrival.
inline std::vector<ARRequest> apply_arrival_factor(std::vector<ARRequest> requests,
                                                   double arrival_factor) {
  if (!(arrival_factor > 0)) throw ConfigError("arrival_factor must be > 0");
  for (auto& r : requests) {
    const Time ready_offset = r.t_r - r.t_a;
    const Time deadline_offset = r.t_dl - r.t_r;
    r.t_a = std::llround(static_cast<double>(r.t_a) / arrival_factor);
    r.t_r = r.t_a + ready_offset;
    r.t_dl = r.t_r + deadline_offset;
  }
  return requests;
}

/// Inter-arrival time source; the default is exponential with the configured mean.
using InterArrivalSampler = std::function<double(Rng&)>;

inline std::vector<ARRequest> generate(const WorkloadConfig& cfg, const InterArrivalSampler& next_gap) {
  cfg.validate();
  Rng rng(cfg.seed);
  std::vector<ARRequest> out;
  out.reserve(cfg.job_count);
  double clock = 0;
  for (std::uint64_t i = 0; i < cfg.job_count; ++i) {
    clock += next_gap(rng);
    ARRequest r;
    r.id = i;
    r.t_a = std::llround(clock);
    r.n_pe = sample_size(cfg, rng);
    r.t_du = sample_runtime(cfg, r.n_pe, rng);
    const auto rd = derive_ar_fields(r.t_a, r.t_du, cfg.artime_factor, cfg.deadline_factor, rng);
    r.t_r = rd.t_r;
    r.t_dl = rd.t_dl;
    out.push_back(r);
  }
  return apply_arrival_factor(std::move(out), cfg.arrival_factor);
}

inline std::vector<ARRequest> generate(const WorkloadConfig& cfg) {
  const double mean = cfg.mean_interarrival;
  return generate(cfg, [mean](Rng& rng) { return rng.exponential(mean); });
}

struct AdmissionFactors {
  double artime = 0;
  double deadline = 0;
  double arrival = 1;
};

struct SwfWorkload {
  std::vector<ARRequest> requests;
  std::size_t skipped = 0;
};

/// Reads a Standard Workload Format trace: submit time (field 2) becomes the
/// arrival, run time (field 4) the duration, allocated processors (field 5)
/// the PE count. Records with unknown run time or processors, or wider than
/// the cluster, are skipped and counted.
inline SwfWorkload parse_swf(std::istream& in, std::uint32_t n_pes, const AdmissionFactors& factors,
                             std::uint64_t seed) {
  SwfWorkload out;
  Rng rng(seed);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == ';') continue;
    std::istringstream fields(line);
    std::vector<double> v;
    std::string tok;
    while (fields >> tok) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ConfigError("swf line " + std::to_string(line_no) + ": non-numeric field '" + tok + "'");
      }
    }
    if (v.size() < 5)
      throw ConfigError("swf line " + std::to_string(line_no) + ": expected at least 5 fields, got " +
                        std::to_string(v.size()));
    const double submit = v[1], run = v[3], procs = v[4];
    if (run <= 0 || procs <= 0 || submit < 0 || procs > n_pes) {
      ++out.skipped;
      continue;
    }
    ARRequest r;
    r.id = static_cast<std::uint64_t>(v[0]);
    r.t_a = std::llround(submit);
    r.t_du = std::llround(run);
    r.n_pe = static_cast<std::uint32_t>(procs);
    const auto rd = derive_ar_fields(r.t_a, r.t_du, factors.artime, factors.deadline, rng);
    r.t_r = rd.t_r;
    r.t_dl = rd.t_dl;
    out.requests.push_back(r);
  }
  std::stable_sort(out.requests.begin(), out.requests.end(),
                   [](const ARRequest& a, const ARRequest& b) { return a.t_a < b.t_a; });
  out.requests = apply_arrival_factor(std::move(out.requests), factors.arrival);
  return out;
}

inline SwfWorkload ingest_swf(const std::string& path, std::uint32_t n_pes,
                              const AdmissionFactors& factors, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read swf file '" + path + "'");
  return parse_swf(in, n_pes, factors, seed);
}

inline constexpr const char* kWorkloadHeader = "id\tt_a\tt_r\tt_du\tt_dl\tn_pe";

inline void write_workload_tsv(std::ostream& out, const std::vector<ARRequest>& requests) {
  out << kWorkloadHeader << '\n';
  for (const auto& r : requests)
    out << r.id << '\t' << r.t_a << '\t' << r.t_r << '\t' << r.t_du << '\t' << r.t_dl << '\t'
        << r.n_pe << '\n';
}

inline std::vector<ARRequest> read_workload_tsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kWorkloadHeader)
    throw ConfigError("workload file: missing header '" + std::string(kWorkloadHeader) + "'");
  std::vector<ARRequest> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    ARRequest r;
    if (!(fields >> r.id >> r.t_a >> r.t_r >> r.t_du >> r.t_dl >> r.n_pe) || !r.valid())
      throw ConfigError("workload file line " + std::to_string(line_no) + ": malformed request");
    out.push_back(r);
  }
  return out;
}

}  // namespace arsched
