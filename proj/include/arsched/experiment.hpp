#pragma once

// Batch experiment runner: (axis value x policy x seed) grid of simulations,
// written out as runs.csv, sweep.csv, optional SVG plots and a manifest.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "arsched/metrics.hpp"
#include "arsched/plot.hpp"
#include "arsched/policies.hpp"
#include "arsched/simengine.hpp"
#include "arsched/workload.hpp"

namespace arsched {

inline constexpr const char* kToolVersion = "0.1.0";

struct ExperimentConfig {
  ClusterConfig cluster;
  WorkloadConfig workload;
  std::vector<Policy> policies{kAllPolicies.begin(), kAllPolicies.end()};
  AxisKind axis = AxisKind::UMed;
  std::vector<AxisValue> values;  ///< empty: the default points for `axis`
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir = "out";
  unsigned threads = 1;
  bool ci = true;
  bool plots = true;

  /// Default sweep points for each axis.
  static std::vector<AxisValue> default_values(AxisKind kind) {
    std::vector<AxisValue> out;
    switch (kind) {
      case AxisKind::UMed:
        for (double v : {5.0, 6.0, 7.0, 8.0, 9.0}) out.push_back({kind, v, 0});
        break;
      case AxisKind::ArrivalFactor:
        for (double v : {0.5, 0.75, 1.0, 1.25, 1.5}) out.push_back({kind, v, 0});
        break;
      case AxisKind::Flexibility:
        for (double v : {1.0, 2.0, 3.0, 4.0, 5.0}) out.push_back({kind, v, v});
        break;
    }
    return out;
  }

  static std::vector<std::uint64_t> seed_range(std::uint64_t base, std::size_t count) {
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(base + i);
    return out;
  }

  std::vector<AxisValue> sweep_values() const { return values.empty() ? default_values(axis) : values; }

  std::vector<std::uint64_t> sweep_seeds() const {
    return seeds.empty() ? seed_range(workload.seed, 10) : seeds;
  }

  void validate() const {
    if (cluster.n_pes == 0) throw ConfigError("cluster.n_pes: must be >= 1");
    workload.validate();
    if (policies.empty()) throw ConfigError("sweep.policies: must not be empty");
    for (const auto& v : sweep_values())
      if (v.kind != axis) throw ConfigError("sweep.values: point " + v.label() + " does not match axis");
    if (ci && sweep_seeds().size() < 2) throw ConfigError("sweep.seeds: intervals need at least 2 seeds");
    if (sweep_seeds().empty()) throw ConfigError("sweep.seeds: must not be empty");
  }
};

inline AxisKind parse_axis(const std::string& s) {
  if (s == "umed") return AxisKind::UMed;
  if (s == "af" || s == "arrival_factor") return AxisKind::ArrivalFactor;
  if (s == "flex" || s == "flexibility") return AxisKind::Flexibility;
  throw ConfigError("sweep.axis: unknown axis '" + s + "' (expected umed, af or flex)");
}

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

inline double to_double(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + s + "'");
}

inline std::uint64_t to_uint(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used == s.size() && s.find('-') == std::string::npos) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a non-negative integer, got '" + s + "'");
}

inline bool to_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + s + "'");
}

}  // namespace detail

/// Parses a sweep point such as "7", "0.75" or "3:3" for the given axis.
inline AxisValue parse_axis_value(AxisKind kind, const std::string& s) {
  AxisValue v{kind, 0, 0};
  if (kind == AxisKind::Flexibility) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ConfigError("sweep.values: flexibility point '" + s + "' needs a:b");
    v.a = detail::to_double("sweep.values", s.substr(0, colon));
    v.b = detail::to_double("sweep.values", s.substr(colon + 1));
  } else {
    v.a = detail::to_double("sweep.values", s);
  }
  return v;
}

/// Applies one "section.key = value" setting; unknown keys are rejected.
inline void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  using namespace detail;
  auto& w = cfg.workload;
  if (key == "cluster.n_pes") {
    cfg.cluster.n_pes = static_cast<std::uint32_t>(to_uint(key, value));
  } else if (key == "workload.job_count") {
    w.job_count = to_uint(key, value);
  } else if (key == "workload.u_low") {
    w.u_low = to_double(key, value);
  } else if (key == "workload.u_med") {
    w.u_med = to_double(key, value);
  } else if (key == "workload.u_hi") {
    w.u_hi = to_double(key, value);
  } else if (key == "workload.u_prob") {
    w.u_prob = to_double(key, value);
  } else if (key == "workload.runtime_values") {
    w.runtime_values.clear();
    for (const auto& item : split_list(value)) w.runtime_values.push_back(static_cast<Time>(to_uint(key, item)));
  } else if (key == "workload.runtime_weights") {
    w.runtime_weights.clear();
    for (const auto& item : split_list(value)) w.runtime_weights.push_back(to_double(key, item));
  } else if (key == "workload.size_runtime_correlation") {
    w.size_runtime_correlation = to_bool(key, value);
  } else if (key == "workload.artime_factor") {
    w.artime_factor = to_double(key, value);
  } else if (key == "workload.deadline_factor") {
    w.deadline_factor = to_double(key, value);
  } else if (key == "workload.arrival_factor") {
    w.arrival_factor = to_double(key, value);
  } else if (key == "workload.mean_interarrival") {
    w.mean_interarrival = to_double(key, value);
  } else if (key == "workload.seed") {
    w.seed = to_uint(key, value);
  } else if (key == "sweep.axis") {
    cfg.axis = parse_axis(value);
    cfg.values.clear();
  } else if (key == "sweep.values") {
    cfg.values.clear();
    for (const auto& item : split_list(value)) cfg.values.push_back(parse_axis_value(cfg.axis, item));
  } else if (key == "sweep.policies") {
    cfg.policies.clear();
    for (const auto& item : split_list(value)) cfg.policies.push_back(parse_policy(item));
  } else if (key == "sweep.seeds") {
    cfg.seeds = ExperimentConfig::seed_range(w.seed, to_uint(key, value));
  } else if (key == "sweep.threads") {
    cfg.threads = static_cast<unsigned>(to_uint(key, value));
  } else if (key == "sweep.ci") {
    cfg.ci = to_bool(key, value);
  } else if (key == "output.dir") {
    cfg.output_dir = value;
  } else if (key == "output.plots") {
    cfg.plots = to_bool(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

/// Reads an INI file with sections [cluster], [workload], [sweep], [output].
/// Keys are applied in file order, so sweep.axis should precede sweep.values
/// and workload.seed should precede sweep.seeds.
inline void load_config_file(ExperimentConfig& cfg, const std::filesystem::path& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config: key '" + section + "' outside any section");
    for (const auto& [key, value] : body) apply_setting(cfg, section + "." + key, value.data());
  }
}

/// FNV-1a, 64-bit.
inline std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline nlohmann::ordered_json workload_json(const WorkloadConfig& w) {
  nlohmann::ordered_json j;
  j["job_count"] = w.job_count;
  j["u_low"] = w.u_low;
  j["u_med"] = w.u_med;
  j["u_hi"] = w.u_hi;
  j["u_prob"] = w.u_prob;
  j["runtime_values"] = w.runtime_values;
  j["runtime_weights"] = w.runtime_weights;
  j["size_runtime_correlation"] = w.size_runtime_correlation;
  j["artime_factor"] = w.artime_factor;
  j["deadline_factor"] = w.deadline_factor;
  j["arrival_factor"] = w.arrival_factor;
  j["mean_interarrival"] = w.mean_interarrival;
  j["seed"] = w.seed;
  return j;
}

inline std::uint64_t config_fingerprint(const WorkloadConfig& w, const ClusterConfig& c) {
  nlohmann::ordered_json j;
  j["n_pes"] = c.n_pes;
  j["workload"] = workload_json(w);
  return fnv1a(j.dump());
}

/// Workload config for one grid cell.
inline WorkloadConfig cell_workload(const WorkloadConfig& base, const AxisValue& axis, std::uint64_t seed) {
  WorkloadConfig w = base;
  w.seed = seed;
  switch (axis.kind) {
    case AxisKind::UMed: w.u_med = axis.a; break;
    case AxisKind::ArrivalFactor: w.arrival_factor = axis.a; break;
    case AxisKind::Flexibility:
      w.artime_factor = axis.a;
      w.deadline_factor = axis.b;
      break;
  }
  return w;
}

/// Runs every (axis value, policy, seed) cell on a pool of `threads` workers.
/// Results come back in canonical order (axis, policy rank, seed) whatever
/// the thread count.
inline std::vector<RunRecord> run_grid(const ExperimentConfig& cfg) {
  cfg.validate();
  struct Cell {
    AxisValue axis;
    Policy policy;
    std::uint64_t seed;
  };
  auto values = cfg.sweep_values();
  std::sort(values.begin(), values.end());
  auto policies = cfg.policies;
  std::sort(policies.begin(), policies.end(),
            [](Policy a, Policy b) { return policy_rank(a) < policy_rank(b); });
  policies.erase(std::unique(policies.begin(), policies.end()), policies.end());

  std::vector<Cell> cells;
  for (const auto& v : values)
    for (Policy p : policies)
      for (std::uint64_t s : cfg.sweep_seeds()) cells.push_back({v, p, s});

  std::vector<RunRecord> out(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        const Cell& c = cells[i];
        const WorkloadConfig w = cell_workload(cfg.workload, c.axis, c.seed);
        const auto requests = generate(w);
        const auto outcomes = simulate(requests, cfg.cluster, c.policy);
        out[i] = RunRecord{c.axis, c.policy, c.seed,
                           summarize(outcomes, c.policy, config_fingerprint(w, cfg.cluster))};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cells.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

struct ExperimentResult {
  std::vector<RunRecord> runs;
  std::vector<SweepPoint> points;
  std::vector<std::filesystem::path> files;
};

/// Executes the sweep and writes its artifacts to cfg.output_dir. Anything
/// written before a failure is removed again.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult result;
  result.runs = run_grid(cfg);
  if (cfg.ci) result.points = aggregate_sweep(result.runs);

  namespace fs = std::filesystem;
  std::vector<fs::path> written;
  try {
    fs::create_directories(cfg.output_dir);
    auto write_file = [&](const std::string& name, const std::string& content) {
      const fs::path p = cfg.output_dir / name;
      std::ofstream f(p, std::ios::binary);
      if (!f) throw Error("cannot write " + p.string());
      written.push_back(p);
      f << content;
      if (!f) throw Error("cannot write " + p.string());
    };
    std::ostringstream runs_csv;
    write_runs_csv(runs_csv, result.runs);
    write_file("runs.csv", runs_csv.str());
    if (cfg.ci) {
      std::ostringstream sweep_csv;
      write_sweep_csv(sweep_csv, result.points);
      write_file("sweep.csv", sweep_csv.str());
      if (cfg.plots) {
        for (auto& p : emit_plots(cfg.output_dir / "sweep.csv", cfg.output_dir)) written.push_back(p);
      }
    }

    nlohmann::ordered_json manifest;
    manifest["tool"] = "arsched";
    manifest["version"] = kToolVersion;
    manifest["created_utc"] = std::chrono::duration_cast<std::chrono::seconds>(
                                  std::chrono::system_clock::now().time_since_epoch())
                                  .count();
    manifest["config"]["cluster"]["n_pes"] = cfg.cluster.n_pes;
    manifest["config"]["workload"] = workload_json(cfg.workload);
    manifest["config"]["sweep"]["axis"] = std::string(axis_name(cfg.axis));
    std::vector<std::string> labels, policy_names;
    for (const auto& v : cfg.sweep_values()) labels.push_back(v.label());
    for (Policy p : cfg.policies) policy_names.emplace_back(policy_name(p));
    manifest["config"]["sweep"]["values"] = labels;
    manifest["config"]["sweep"]["policies"] = policy_names;
    manifest["config"]["sweep"]["ci"] = cfg.ci;
    manifest["seeds"] = cfg.sweep_seeds();
    for (const auto& p : written) {
      std::ifstream f(p, std::ios::binary);
      std::stringstream buf;
      buf << f.rdbuf();
      manifest["digests"][p.filename().string()] = "fnv1a64:" + hex64(fnv1a(buf.str()));
    }
    write_file("manifest.json", manifest.dump(2) + "\n");
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) fs::remove(p, ec);
    throw;
  }
  result.files = written;
  return result;
}

}  // namespace arsched
