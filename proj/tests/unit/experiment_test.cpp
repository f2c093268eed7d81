#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "c3sim/errors.hpp"
#include "c3sim/experiment.hpp"

using namespace c3sim;
using nlohmann::json;

namespace {

ExperimentConfig small_config() {
  return ExperimentConfig::from_json(json::parse(R"({
    "R": [200, 400], "N": 10, "scenario": "iid",
    "schedulers": ["c3p", "static", "nonergodic", "uncoded", "rr", "hcmm_like"],
    "replicates": 3, "seed": 42 })"));
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST(Config, DefaultsFollowSimulationSetup) {
  const ExperimentConfig c = ExperimentConfig::from_json(json::object());
  EXPECT_EQ(c.mu_set, (std::vector<double>{1.0, 2.0, 4.0}));
  EXPECT_EQ(c.shift_value, 0.5);
  EXPECT_EQ(c.channel.min_mbps, 10.0);
  EXPECT_EQ(c.channel.max_mbps, 20.0);
  EXPECT_EQ(c.overhead_fraction, 0.05);
  EXPECT_EQ(c.sizes(2000).data_bits, 16000.0);
}

TEST(Config, StrictParsing) {
  EXPECT_THROW(ExperimentConfig::from_json(json::parse(R"({"rows": 5})")), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(json::parse(R"({"schedulers": ["fancy"]})")), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(json::parse(R"({"replicates": 0})")), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(json::parse(R"({"R": []})")), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(json::parse(R"({"channel": {"speed": 1}})")), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(json::parse(R"({"alpha": 1.5})")), ConfigError);
  EXPECT_THROW(ExperimentConfig::load("/nonexistent/config.json"), ConfigError);
}

TEST(Config, InverseRateShift) {
  const ExperimentConfig c = ExperimentConfig::from_json(
      json::parse(R"({"mu_set": [1, 3, 9], "shift": "inverse_mu"})"));
  for (const HelperProfile& h : make_population(c.population(50), 1)) {
    EXPECT_DOUBLE_EQ(h.shift, 1.0 / h.rate);
  }
}

TEST(Experiment, SeedsAreBasePlusIndexInOrder) {
  const ExperimentOutput out = run_experiment(small_config());
  ASSERT_EQ(out.runs.size(), 2u * 3u * 6u);
  for (std::size_t i = 0; i < out.runs.size(); ++i) {
    const RunRow& r = out.runs[i];
    EXPECT_EQ(r.rows, i < 18 ? 200u : 400u);
    EXPECT_EQ(r.seed, 42u + (i % 18) / 6);
    EXPECT_EQ(r.scheduler, kSchedulerNames[i % 6]);
  }
  ASSERT_EQ(out.theory.size(), 6u);
}

TEST(Experiment, OracleNoSlowerThanC3pOnSharedTape) {
  const ExperimentOutput out = run_experiment(small_config());
  for (std::size_t i = 0; i < out.runs.size(); i += 6) {
    EXPECT_LE(out.runs[i + 2].t_total, out.runs[i].t_total);
    EXPECT_EQ(out.runs[i + 0].k_actual, overhead_count(out.runs[i].rows, 0.05));
  }
}

TEST(Experiment, WorkerCountDoesNotChangeOutput) {
  auto csv = [] {
    std::ostringstream s;
    write_runs_csv(s, run_experiment(small_config()).runs, CsvOptions{true});
    return s.str();
  };
  ::setenv("C3SIM_WORKERS", "1", 1);
  const std::string one = csv();
  ::setenv("C3SIM_WORKERS", "3", 1);
  const std::string three = csv();
  ::unsetenv("C3SIM_WORKERS");
  EXPECT_EQ(one, three);
}

TEST(Experiment, WorkerEnvValidated) {
  ::setenv("C3SIM_WORKERS", "zero", 1);
  EXPECT_THROW(worker_count(), ConfigError);
  ::setenv("C3SIM_WORKERS", "2", 1);
  EXPECT_EQ(worker_count(), 2u);
  ::unsetenv("C3SIM_WORKERS");
}

TEST(Csv, Headers) {
  const ExperimentOutput out = run_experiment(small_config());
  std::ostringstream runs, agg, imp, eff, th;
  write_runs_csv(runs, out.runs);
  write_aggregate_csv(agg, out.runs);
  write_improvement_csv(imp, out.runs);
  write_efficiency_csv(eff, out.helper_rows);
  write_theory_csv(th, out.theory);
  EXPECT_EQ(first_line(runs.str()),
            "R,N,scenario,scheduler,seed,T_total,K_actual,mean_efficiency,min_efficiency,waste,wall_ms");
  EXPECT_EQ(first_line(agg.str()),
            "R,N,scenario,scheduler,replicates,T_mean,T_ci95,K_mean,efficiency_mean,efficiency_ci95,"
            "waste_mean");
  EXPECT_EQ(first_line(imp.str()),
            "R,N,scenario,baseline,replicates,improvement_pct_mean,improvement_pct_ci95,win_rate");
  EXPECT_EQ(first_line(eff.str()), "R,N,seed,scheduler,helper,mu,a,rtt_data,r,efficiency,gamma_theory");
  EXPECT_EQ(first_line(th.str()), "R,N,seed,T_static_pred,T_c3p_pred,gamma_theory_mean");
  // 2 sweep points x 6 schedulers, plus header.
  const std::string agg_text = agg.str();
  EXPECT_EQ(std::count(agg_text.begin(), agg_text.end(), '\n'), 13);
}

TEST(Summary, MeanAndInterval) {
  const Summary s = summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_EQ(s.n, 4u);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.ci95, 1.96 * std::sqrt(5.0 / 3.0) / 2.0, 1e-12);
}

TEST(RunSingle, MatchesReplicateRun) {
  const ExperimentConfig c = small_config();
  const ReplicateOutput rep = run_replicate(c, 200, 10, 42);
  for (std::size_t k = 0; k < kSchedulerNames.size(); ++k) {
    const RunResult r = run_single(c, 200, 10, 42, kSchedulerNames[k]);
    EXPECT_EQ(r.metrics.t_total, rep.runs[k].t_total) << kSchedulerNames[k];
  }
}
