#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "arsched/experiment.hpp"

using namespace arsched;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("arsched_test_" + name);
  fs::remove_all(p);
  return p;
}

// Default cluster, 120 jobs per run, two seeds.
ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig cfg;
  cfg.cluster.n_pes = 1024;
  cfg.workload.job_count = 120;
  cfg.seeds = ExperimentConfig::seed_range(1, 2);
  cfg.output_dir = out;
  return cfg;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Config, FileSectionsApplied) {
  const fs::path dir = scratch("config");
  fs::create_directories(dir);
  std::ofstream(dir / "exp.ini") << "[cluster]\nn_pes = 512\n"
                                    "[workload]\nseed = 40\nu_med = 6\njob_count = 50\n"
                                    "[sweep]\naxis = flex\nvalues = 1:2, 3:3\npolicies = ff, pe_w\nseeds = 3\n"
                                    "[output]\ndir = results\nplots = false\n";
  ExperimentConfig cfg;
  load_config_file(cfg, dir / "exp.ini");
  EXPECT_EQ(cfg.cluster.n_pes, 512u);
  EXPECT_EQ(cfg.workload.u_med, 6.0);
  EXPECT_EQ(cfg.workload.job_count, 50u);
  EXPECT_EQ(cfg.axis, AxisKind::Flexibility);
  ASSERT_EQ(cfg.values.size(), 2u);
  EXPECT_EQ(cfg.values[0].label(), "flex=1:2");
  EXPECT_EQ(cfg.policies, (std::vector<Policy>{Policy::FF, Policy::PE_W}));
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{40, 41, 42}));
  EXPECT_EQ(cfg.output_dir, fs::path("results"));
  EXPECT_FALSE(cfg.plots);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, ErrorsNameTheKey) {
  ExperimentConfig cfg;
  auto message = [&](const std::string& key, const std::string& value) -> std::string {
    try {
      apply_setting(cfg, key, value);
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_NE(message("workload.bogus", "1").find("workload.bogus"), std::string::npos);
  EXPECT_NE(message("workload.u_med", "seven").find("workload.u_med"), std::string::npos);
  EXPECT_NE(message("sweep.axis", "load").find("sweep.axis"), std::string::npos);

  ExperimentConfig bad;
  bad.workload.u_hi = 3;
  try {
    bad.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("workload.u_hi"), std::string::npos);
  }
  ExperimentConfig one_seed;
  one_seed.seeds = {1};
  EXPECT_THROW(one_seed.validate(), ConfigError);
  one_seed.ci = false;
  EXPECT_NO_THROW(one_seed.validate());
}

TEST(Fingerprint, TracksWorkloadAndCluster) {
  WorkloadConfig w;
  const auto base = config_fingerprint(w, ClusterConfig{1024});
  EXPECT_EQ(base, config_fingerprint(w, ClusterConfig{1024}));
  EXPECT_NE(base, config_fingerprint(w, ClusterConfig{512}));
  w.seed = 2;
  EXPECT_NE(base, config_fingerprint(w, ClusterConfig{1024}));
}

TEST(RunExperiment, DefaultShapeSweepCsv) {
  const fs::path out = scratch("shape");
  auto cfg = small_config(out);
  const auto res = run_experiment(cfg);
  EXPECT_EQ(res.runs.size(), 5u * 7u * 2u);
  const auto sweep = slurp(out / "sweep.csv");
  EXPECT_EQ(count_lines(sweep), 1u + 5u * 7u * 2u);
  EXPECT_EQ(sweep.substr(0, sweep.find('\n')), kSweepHeader);
  EXPECT_TRUE(fs::exists(out / "umed_acceptance_rate.svg"));
  EXPECT_TRUE(fs::exists(out / "umed_avg_slowdown.svg"));
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
}

TEST(RunExperiment, NoCiSingleSeedWritesRunsOnly) {
  const fs::path out = scratch("noci");
  auto cfg = small_config(out);
  cfg.policies = {Policy::FF};
  cfg.seeds = {1};
  cfg.ci = false;
  run_experiment(cfg);
  EXPECT_FALSE(fs::exists(out / "sweep.csv"));
  EXPECT_FALSE(fs::exists(out / "umed_acceptance_rate.svg"));
  const auto runs = slurp(out / "runs.csv");
  EXPECT_EQ(count_lines(runs), 1u + 5u);
  EXPECT_NE(runs.find("\numed=5,ff,1,"), std::string::npos);
}

TEST(RunExperiment, RerunGivesIdenticalDigests) {
  const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
  auto cfg = small_config(a);
  cfg.axis = AxisKind::ArrivalFactor;
  run_experiment(cfg);
  cfg.output_dir = b;
  run_experiment(cfg);
  const auto ma = nlohmann::json::parse(slurp(a / "manifest.json"));
  const auto mb = nlohmann::json::parse(slurp(b / "manifest.json"));
  EXPECT_EQ(ma["digests"], mb["digests"]);
  EXPECT_EQ(ma["config"], mb["config"]);
  EXPECT_EQ(ma["seeds"], (std::vector<int>{1, 2}));
  EXPECT_EQ(ma["digests"]["runs.csv"], "fnv1a64:" + hex64(fnv1a(slurp(a / "runs.csv"))));
}

TEST(RunExperiment, ParallelMatchesSerial) {
  const fs::path a = scratch("serial"), b = scratch("parallel");
  auto cfg = small_config(a);
  cfg.axis = AxisKind::Flexibility;
  cfg.threads = 1;
  run_experiment(cfg);
  cfg.output_dir = b;
  cfg.threads = 4;
  run_experiment(cfg);
  EXPECT_EQ(slurp(a / "runs.csv"), slurp(b / "runs.csv"));
  EXPECT_EQ(slurp(a / "sweep.csv"), slurp(b / "sweep.csv"));
}

TEST(RunExperiment, PartialOutputsRemovedOnFailure) {
  const fs::path out = scratch("partial");
  fs::create_directories(out / "sweep.csv");  // blocks the second file
  auto cfg = small_config(out);
  cfg.policies = {Policy::FF};
  EXPECT_THROW(run_experiment(cfg), Error);
  EXPECT_FALSE(fs::exists(out / "runs.csv"));
  EXPECT_FALSE(fs::exists(out / "manifest.json"));
}

TEST(RunExperiment, InvalidConfigWritesNothing) {
  const fs::path out = scratch("invalid");
  auto cfg = small_config(out);
  cfg.workload.arrival_factor = 0;
  EXPECT_THROW(run_experiment(cfg), ConfigError);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Plots, TwoFilesPerAxisMatchingGolden) {
  const fs::path out = scratch("plots");
  const auto files = emit_plots(fs::path(ARSCHED_TEST_DATA) / "sweep_small.csv", out);
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(files[0].filename(), "af_acceptance_rate.svg");
  EXPECT_EQ(files[1].filename(), "af_avg_slowdown.svg");
  EXPECT_EQ(slurp(files[0]), slurp(fs::path(ARSCHED_TEST_DATA) / "af_acceptance_rate.svg"));
  // Legend lists ff before pe_w even though the CSV has pe_w first.
  const auto doc = slurp(files[0]);
  EXPECT_LT(doc.find(">ff</text>"), doc.find(">pe_w</text>"));
}

TEST(Plots, EmptyCsvWritesNothing) {
  const fs::path dir = scratch("plots_empty");
  fs::create_directories(dir);
  std::ofstream(dir / "sweep.csv") << kSweepHeader << "\n";
  EXPECT_THROW(emit_plots(dir / "sweep.csv", dir / "out"), ConfigError);
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Plots, MalformedRowNamed) {
  std::istringstream in(std::string(kSweepHeader) + "\numed=5,ff,acceptance_rate,0.5,0.1\numed=6,ff,acceptance_rate,abc,0.1\n");
  try {
    parse_sweep_csv(in);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
  }
}

TEST(Defaults, MidRangeContention) {
  const ExperimentConfig cfg;
  const auto requests = generate(cfg.workload);
  for (Policy p : kAllPolicies) {
    const auto s = summarize(simulate(requests, cfg.cluster, p), p);
    EXPECT_GT(s.acceptance_rate, 0.3) << policy_name(p);
    EXPECT_LT(s.acceptance_rate, 0.9) << policy_name(p);
  }
}
