// arsched: advance-reservation admission simulator.
//
//   arsched simulate [--policy pe_w] [--workload jobs.tsv | --swf trace.swf]
//   arsched sweep    [--axis umed|af|flex] [--seeds 10] [--out dir]
//   arsched gen      [--out jobs.tsv]
//   arsched validate [--sequences 200] [--queries 200]
//
// Exit codes: 0 success, 1 configuration error, 2 internal invariant violation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "arsched/experiment.hpp"
#include "arsched/validate.hpp"

namespace {

using namespace arsched;

struct Overrides {
  std::string config;
  std::optional<double> umed, arrival_factor, artime_factor, deadline_factor, mean_interarrival;
  std::optional<std::uint64_t> jobs, seed;
  std::optional<std::uint32_t> n_pes;

  void attach(CLI::App* cmd) {
    cmd->add_option("-c,--config", config, "INI config file ([cluster] [workload] [sweep] [output])");
    cmd->add_option("--umed", umed, "UMed of the job size distribution");
    cmd->add_option("--arrival-factor", arrival_factor, "arrival time divisor (load knob)");
    cmd->add_option("--artime-factor", artime_factor, "book-ahead factor");
    cmd->add_option("--deadline-factor", deadline_factor, "deadline slack factor");
    cmd->add_option("--mean-interarrival", mean_interarrival, "mean inter-arrival time (s)");
    cmd->add_option("--jobs", jobs, "number of jobs per run");
    cmd->add_option("--seed", seed, "base random seed");
    cmd->add_option("--n-pes", n_pes, "cluster size");
  }

  ExperimentConfig load() const {
    ExperimentConfig cfg;
    if (!config.empty()) load_config_file(cfg, config);
    auto& w = cfg.workload;
    if (umed) w.u_med = *umed;
    if (arrival_factor) w.arrival_factor = *arrival_factor;
    if (artime_factor) w.artime_factor = *artime_factor;
    if (deadline_factor) w.deadline_factor = *deadline_factor;
    if (mean_interarrival) w.mean_interarrival = *mean_interarrival;
    if (jobs) w.job_count = *jobs;
    if (seed) w.seed = *seed;
    if (n_pes) cfg.cluster.n_pes = *n_pes;
    return cfg;
  }
};

void print_summary(const RunSummary& s) {
  std::printf("policy          %s\n", std::string(policy_name(s.policy)).c_str());
  std::printf("jobs            %llu\n", static_cast<unsigned long long>(s.n_jobs));
  std::printf("accepted        %llu\n", static_cast<unsigned long long>(s.n_accepted));
  std::printf("acceptance_rate %.6f\n", s.acceptance_rate);
  if (s.avg_slowdown)
    std::printf("avg_slowdown    %.6f\n", *s.avg_slowdown);
  else
    std::printf("avg_slowdown    -\n");
  std::printf("fingerprint     %s\n", hex64(s.config_fingerprint).c_str());
}

void print_report(const validation::Report& r) {
  std::printf("[%s] %s: %zu cases, %zu failures, %.2fs", r.ok() ? "PASS" : "FAIL", r.name.c_str(), r.cases,
              r.failures, r.seconds);
  if (r.rejected > 0)
    std::printf(", %zu rejected (%zu placeable off-candidate)", r.rejected, r.missed_by_candidates);
  std::printf("\n");
  if (!r.ok()) std::printf("    first failure: %s\n", r.first_failure.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Advance-reservation admission control simulator"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "run one simulation and print its summary");
  Overrides sim_over;
  sim_over.attach(sim);
  std::string sim_policy = "ff", sim_workload, sim_swf, sim_outcomes;
  bool dump_calendar = false;
  sim->add_option("-p,--policy", sim_policy, "ff, pe_b, du_b, pedu_b, pe_w, du_w, pedu_w");
  sim->add_option("--workload", sim_workload, "replay a generated workload file");
  sim->add_option("--swf", sim_swf, "replay a Standard Workload Format trace");
  sim->add_option("--outcomes", sim_outcomes, "write per-job outcomes (TSV)");
  sim->add_flag("--dump-calendar", dump_calendar, "print the calendar as left after the last arrival");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a full experiment sweep");
  Overrides sweep_over;
  sweep_over.attach(sweep);
  std::optional<std::string> axis, values, policies, out_dir;
  std::optional<std::size_t> n_seeds;
  std::optional<unsigned> threads;
  bool no_ci = false, no_plots = false;
  sweep->add_option("--axis", axis, "umed, af or flex");
  sweep->add_option("--values", values, "comma-separated sweep points (flex points as a:b)");
  sweep->add_option("--policies", policies, "comma-separated policy names");
  sweep->add_option("--seeds", n_seeds, "number of seeds per point (default 10)");
  sweep->add_option("--threads", threads, "worker threads");
  sweep->add_option("-o,--out", out_dir, "output directory");
  sweep->add_flag("--no-ci", no_ci, "skip interval aggregation (runs.csv only)");
  sweep->add_flag("--no-plots", no_plots, "skip SVG plots");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a workload file");
  Overrides gen_over;
  gen_over.attach(gen);
  std::string gen_out;
  gen->add_option("-o,--out", gen_out, "output file (default stdout)");

  // validate
  auto* val = app.add_subcommand("validate", "check the calendar against the brute-force oracle");
  std::size_t sequences = 200, queries = 200;
  std::uint64_t val_seed = 7;
  val->add_option("--sequences", sequences, "random add/delete sequences");
  val->add_option("--queries", queries, "random admission queries per policy");
  val->add_option("--seed", val_seed, "random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      ExperimentConfig cfg = sim_over.load();
      const Policy policy = parse_policy(sim_policy);
      cfg.workload.validate();
      std::vector<ARRequest> requests;
      if (!sim_workload.empty()) {
        std::ifstream in(sim_workload);
        if (!in) throw ConfigError("cannot read workload file '" + sim_workload + "'");
        requests = read_workload_tsv(in);
      } else if (!sim_swf.empty()) {
        const auto& w = cfg.workload;
        auto swf = ingest_swf(sim_swf, cfg.cluster.n_pes,
                              AdmissionFactors{w.artime_factor, w.deadline_factor, w.arrival_factor}, w.seed);
        std::fprintf(stderr, "swf: %zu requests, %zu records skipped\n", swf.requests.size(), swf.skipped);
        requests = std::move(swf.requests);
      } else {
        requests = generate(cfg.workload);
      }
      if (requests.empty()) throw ConfigError("no requests to simulate");
      Simulator simulator(cfg.cluster, policy);
      const auto outcomes = simulator.run(requests, !dump_calendar);
      print_summary(summarize(outcomes, policy, config_fingerprint(cfg.workload, cfg.cluster)));
      if (!sim_outcomes.empty()) {
        std::ofstream out(sim_outcomes);
        write_outcomes_tsv(out, outcomes);
      }
      if (dump_calendar) std::cout << simulator.calendar().dump();
    } else if (*sweep) {
      ExperimentConfig cfg = sweep_over.load();
      cfg.threads = std::max(1u, std::thread::hardware_concurrency());
      if (axis) apply_setting(cfg, "sweep.axis", *axis);
      if (values) apply_setting(cfg, "sweep.values", *values);
      if (policies) apply_setting(cfg, "sweep.policies", *policies);
      if (n_seeds) cfg.seeds = ExperimentConfig::seed_range(cfg.workload.seed, *n_seeds);
      if (threads) cfg.threads = *threads;
      if (out_dir) cfg.output_dir = *out_dir;
      if (no_ci) cfg.ci = false;
      if (no_plots) cfg.plots = false;
      const auto result = run_experiment(cfg);
      for (const auto& f : result.files) std::printf("wrote %s\n", f.string().c_str());
      for (const auto& p : result.points) {
        std::printf("%-10s %-7s acceptance %.4f ± %.4f", p.axis.label().c_str(),
                    std::string(policy_name(p.policy)).c_str(), p.acceptance.mean, p.acceptance.half_width);
        if (p.slowdown)
          std::printf("  slowdown %.4f ± %.4f\n", p.slowdown->mean, p.slowdown->half_width);
        else
          std::printf("  slowdown -\n");
      }
    } else if (*gen) {
      const ExperimentConfig cfg = gen_over.load();
      const auto requests = generate(cfg.workload);
      if (gen_out.empty()) {
        write_workload_tsv(std::cout, requests);
      } else {
        std::ofstream out(gen_out);
        if (!out) throw ConfigError("cannot write '" + gen_out + "'");
        write_workload_tsv(out, requests);
      }
    } else if (*val) {
      bool ok = true;
      const auto eq = validation::oracle_equivalence(sequences, val_seed);
      print_report(eq);
      ok = ok && eq.ok();
      for (Policy p : kAllPolicies) {
        const auto r = validation::admission_equivalence(p, queries, val_seed + 1 + policy_rank(p));
        print_report(r);
        ok = ok && r.ok();
      }
      return ok ? 0 : 2;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const InvariantError& e) {
    std::fprintf(stderr, "invariant violation: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
