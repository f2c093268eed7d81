// c3sim: run experiment sweeps, the verifier battery, or dump one run's trace.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "c3sim/errors.hpp"
#include "c3sim/experiment.hpp"
#include "c3sim/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitVerify = 3;

int cmd_run(const std::string& config_path, const std::string& out_dir, bool omit_timing) {
  const c3sim::ExperimentConfig config = c3sim::ExperimentConfig::load(config_path);
  const c3sim::ExperimentOutput out = c3sim::run_experiment(config);
  c3sim::write_experiment(out_dir, out, c3sim::CsvOptions{omit_timing});
  std::cerr << "wrote " << out.runs.size() << " runs to " << out_dir << '\n';
  return kExitOk;
}

int cmd_verify(const std::string& out_dir) {
  const c3sim::VerifyReport report = c3sim::run_verification();
  report.write_text(std::cout);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream csv(std::filesystem::path(out_dir) / "verify.csv");
    std::ofstream txt(std::filesystem::path(out_dir) / "verify.txt");
    if (!csv || !txt) throw c3sim::ConfigError("cannot write verification report to " + out_dir);
    report.write_csv(csv);
    report.write_text(txt);
  }
  return report.all_passed() ? kExitOk : kExitVerify;
}

int cmd_trace(const std::string& config_path, std::uint64_t seed, const std::string& scheduler,
              const std::string& out_path) {
  const c3sim::ExperimentConfig config = c3sim::ExperimentConfig::load(config_path);
  const c3sim::RunResult result = c3sim::run_single(config, config.rows.front(),
                                                    config.helpers.front(), seed, scheduler, true);
  if (out_path.empty()) {
    result.trace.write_csv(std::cout);
  } else {
    std::ofstream f(out_path);
    if (!f) throw c3sim::ConfigError("cannot write trace to " + out_path);
    result.trace.write_csv(f);
  }
  std::cerr << scheduler << ": T_total=" << result.metrics.t_total
            << " K_actual=" << result.metrics.k_actual << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coded cooperative computation simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, trace_out, scheduler = "c3p";
  bool omit_timing = false;
  std::uint64_t seed = 1;

  auto* run = app.add_subcommand("run", "Run an experiment sweep and write CSV tables");
  run->add_option("--config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_flag("--omit-timing", omit_timing, "Write wall_ms as 0 for byte-identical output");

  auto* verify = app.add_subcommand("verify", "Run the verifier battery");
  verify->add_option("--out", out_dir, "Directory for verify.txt and verify.csv");

  auto* trace = app.add_subcommand("trace", "Emit the event trace of one run as CSV");
  trace->add_option("--config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
  trace->add_option("--seed", seed, "Replicate seed")->required();
  trace->add_option("--scheduler", scheduler, "Scheduler name")
      ->check(CLI::IsMember(c3sim::kSchedulerNames));
  trace->add_option("--out", trace_out, "Write the trace here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, out_dir, omit_timing);
    if (*verify) return cmd_verify(out_dir);
    if (*trace) return cmd_trace(config_path, seed, scheduler, trace_out);
  } catch (const c3sim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
