#pragma once

// JSON-configured parameter sweeps over seeded replicates, with CSV output.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "c3sim/baselines.hpp"
#include "c3sim/c3p.hpp"
#include "c3sim/codec.hpp"
#include "c3sim/engine.hpp"
#include "c3sim/workload.hpp"

namespace c3sim {

inline const std::vector<std::string> kSchedulerNames = {"c3p", "static", "nonergodic",
                                                         "uncoded", "rr", "hcmm_like"};

struct ChannelSpec {
  ChannelKind kind = ChannelKind::kPoisson;
  double min_mbps = 10.0;
  double max_mbps = 20.0;
  double rate_floor_mbps = 0.1;
};

struct ExperimentConfig {
  std::vector<std::size_t> rows{2000};
  std::vector<std::size_t> helpers{100};
  Scenario scenario = Scenario::kPerPacketIid;
  std::vector<std::string> schedulers = kSchedulerNames;
  std::vector<double> mu_set{1.0, 2.0, 4.0};
  ShiftRule shift_rule = ShiftRule::kFixed;
  double shift_value = 0.5;
  ChannelSpec channel;
  double bits_per_row = 8.0;
  double result_bits = 8.0;
  double ack_bits = 1.0;
  double alpha = 0.125;
  EstimatorMode estimator = EstimatorMode::kInferred;
  StopMode stop = StopMode::kIdealized;
  double overhead_fraction = 0.05;
  SolitonParams soliton;
  std::size_t replicates = 10;
  std::uint64_t seed = 1;
  std::uint64_t event_cap = 100'000'000;

  void validate() const;
  PopulationSpec population(std::size_t n) const;
  PacketSizes sizes(std::size_t r) const;

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::filesystem::path& path);
};

// Everything a scheduler factory needs for one (R, N, seed) point.
struct RunContext {
  const ExperimentConfig* config = nullptr;
  std::size_t rows = 0;
  std::uint64_t seed = 0;
  RuntimeTape* tape = nullptr;

  std::size_t overhead() const;
  PacketSizes sizes() const;
  std::vector<double> packet_means() const;        // fixed beta in FixedPerHelper mode
  std::vector<double> distribution_means() const;  // a + 1/mu
};

std::unique_ptr<Scheduler> make_scheduler(const std::string& name, const RunContext& ctx);

// Builds the population and tape for (R, N, seed) and runs one scheduler.
RunResult run_single(const ExperimentConfig& config, std::size_t rows, std::size_t helpers,
                     std::uint64_t seed, const std::string& scheduler, bool record_events = false);

struct RunRow {
  std::size_t rows = 0;
  std::size_t helpers = 0;
  Scenario scenario = Scenario::kPerPacketIid;
  std::string scheduler;
  std::uint64_t seed = 0;
  double t_total = 0.0;
  std::size_t k_actual = 0;
  double mean_efficiency = 0.0;
  double min_efficiency = 0.0;
  std::size_t waste = 0;
  double wall_ms = 0.0;
};

struct HelperRow {
  std::size_t rows = 0;
  std::size_t helpers = 0;
  std::uint64_t seed = 0;
  std::string scheduler;
  HelperId helper = 0;
  double mu = 0.0;
  double a = 0.0;
  double rtt_data = 0.0;
  std::size_t r = 0;
  double efficiency = 0.0;
  double gamma_theory = 0.0;
};

struct TheoryRow {
  std::size_t rows = 0;
  std::size_t helpers = 0;
  std::uint64_t seed = 0;
  double t_static = 0.0;
  double t_c3p = 0.0;
  double gamma_mean = 0.0;
};

struct ReplicateOutput {
  std::vector<RunRow> runs;
  std::vector<HelperRow> helper_rows;
  TheoryRow theory;
};

// All configured schedulers on one coupled tape.
ReplicateOutput run_replicate(const ExperimentConfig& config, std::size_t rows,
                              std::size_t helpers, std::uint64_t seed);

// RTT^data predicted from a helper's mean link rate.
double mean_rtt_data(const HelperProfile& profile, const ChannelSpec& channel,
                     const PacketSizes& sizes);

struct ExperimentOutput {
  std::vector<RunRow> runs;
  std::vector<HelperRow> helper_rows;
  std::vector<TheoryRow> theory;
};

// Replicates run on a worker pool sized by C3SIM_WORKERS (default: hardware
// concurrency); rows come back in (R, N, replicate) order.
ExperimentOutput run_experiment(const ExperimentConfig& config);

std::size_t worker_count();

struct CsvOptions {
  bool omit_timing = false;
};

void write_runs_csv(std::ostream& out, const std::vector<RunRow>& runs, CsvOptions opts = {});
void write_aggregate_csv(std::ostream& out, const std::vector<RunRow>& runs);
void write_improvement_csv(std::ostream& out, const std::vector<RunRow>& runs);
void write_efficiency_csv(std::ostream& out, const std::vector<HelperRow>& rows);
void write_theory_csv(std::ostream& out, const std::vector<TheoryRow>& rows);

// Writes runs.csv, aggregate.csv, improvement.csv, efficiency.csv and
// theory.csv under `dir`.
void write_experiment(const std::filesystem::path& dir, const ExperimentOutput& out,
                      CsvOptions opts = {});

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double ci95 = 0.0;  // 1.96 s / sqrt(n)
};

Summary summarize(const std::vector<double>& xs);

}  // namespace c3sim
