#include "c3sim/verify.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>

#include "c3sim/baselines.hpp"
#include "c3sim/engine.hpp"

namespace c3sim {

namespace {

CheckResult make_check(std::string name, double measured, double expected, double tol,
                       std::string detail = {}) {
  CheckResult c;
  c.name = std::move(name);
  c.measured = measured;
  c.expected = expected;
  c.tolerance = tol;
  c.pass = std::abs(measured - expected) <= tol;
  c.detail = std::move(detail);
  return c;
}

double run_on(RuntimeTape& tape, Scheduler& s, std::size_t rows) {
  Engine engine(tape, EngineConfig{PacketSizes::for_rows(rows), 1'000'000, false});
  return engine.run(s).metrics.t_total;
}

}  // namespace

bool VerifyReport::all_passed() const {
  for (const CheckResult& c : checks) {
    if (!c.pass) return false;
  }
  return !checks.empty();
}

void VerifyReport::write_text(std::ostream& out) const {
  char buf[256];
  for (const CheckResult& c : checks) {
    std::snprintf(buf, sizeof buf, "[%s] %-34s measured=%.6g expected=%.6g tol=%.3g", c.pass ? "PASS" : "FAIL",
                  c.name.c_str(), c.measured, c.expected, c.tolerance);
    out << buf;
    if (!c.detail.empty()) out << "  " << c.detail;
    out << '\n';
  }
  std::size_t passed = 0;
  for (const CheckResult& c : checks) passed += c.pass ? 1 : 0;
  out << passed << '/' << checks.size() << " checks passed\n";
}

void VerifyReport::write_csv(std::ostream& out) const {
  out << "check,pass,measured,expected,tolerance\n";
  char buf[256];
  for (const CheckResult& c : checks) {
    std::snprintf(buf, sizeof buf, "%s,%d,%.12g,%.12g,%.6g\n", c.name.c_str(), c.pass ? 1 : 0,
                  c.measured, c.expected, c.tolerance);
    out << buf;
  }
}

ThreeRowReplay replay_three_row() {
  const std::vector<std::vector<double>> per_row = {{1.0}, {2.0}, {10.0}};
  const std::size_t rows = 6;
  ThreeRowReplay r;

  {
    RuntimeTape tape = RuntimeTape::from_runtimes(per_row);
    BlockScheduler s("uncoded", {2, 2, 2}, rows);
    r.naive = run_on(tape, s, rows);
  }
  {
    RuntimeTape tape = RuntimeTape::from_runtimes(per_row);
    BlockScheduler s("block_coded", {3, 3, 3}, rows, rows);
    r.coded_equal = run_on(tape, s, rows);
  }
  {
    RuntimeTape tape = RuntimeTape::from_runtimes(per_row);
    const std::vector<double> means = {1.0, 2.0, 10.0};
    r.static_split = static_allocate(means, rows).r;
    BlockScheduler s = make_static_scheduler(means, rows);
    r.heterogeneity_aware = run_on(tape, s, rows);
  }
  {
    RuntimeTape tape = RuntimeTape::from_runtimes(per_row);
    NonErgodicOracle s(tape, PacketSizes::for_rows(rows),
                       CollectorConfig{rows, StopMode::kIdealized, 0.0, {}, 0});
    r.oracle = run_on(tape, s, rows);
  }
  return r;
}

IrregularTapeReplay replay_irregular_tape(EstimatorMode estimator) {
  const std::vector<std::vector<double>> betas = {
      {1.0, 1.0, 0.5, 1.0, 1.5}, {1.5, 3.5}, {3.0, 2.5}};
  const std::size_t rows = 6;
  const CadenceParams cadence{estimator, 0.125, PacketSizes::for_rows(rows), kDefaultTtiFloor};
  IrregularTapeReplay r;
  {
    RuntimeTape tape = RuntimeTape::from_runtimes(betas);
    RepetitionRoundRobin s(cadence, rows);
    r.rr = run_on(tape, s, rows);
    r.rr_duplicates = s.duplicates();
  }
  {
    RuntimeTape tape = RuntimeTape::from_runtimes(betas);
    C3pScheduler s(C3pConfig{cadence, CollectorConfig{rows, StopMode::kIdealized, 0.0, {}, 0}});
    r.c3p = run_on(tape, s, rows);
  }
  return r;
}

CheckResult check_expected_tu_mc(const VerifyOptions& opts) {
  Rng rng = make_rng(opts.seed, Stream::kTheory, 10);
  std::uniform_real_distribution<double> mu_dist(0.5, 10.0), a_dist(0.0, 2.0), frac(0.0, 2.0);
  double worst = 0.0;
  std::string where;
  for (std::size_t t = 0; t < opts.tu_triples; ++t) {
    const double mu = mu_dist(rng), a = a_dist(rng), rtt = frac(rng) / mu;
    const double closed = opts.expected_tu(mu, a, rtt);
    const double mc = theory::expected_tu_mc(mu, a, rtt, opts.tu_samples, opts.seed + t);
    const double err = std::abs(closed - mc);
    if (err > worst || std::isnan(err)) {
      worst = std::isnan(err) ? INFINITY : err;
      char buf[128];
      std::snprintf(buf, sizeof buf, "worst at mu=%.4g a=%.4g rtt=%.4g", mu, a, rtt);
      where = buf;
    }
  }
  return make_check("expected_tu_vs_monte_carlo", worst, 0.0, opts.tu_tolerance, where);
}

CheckResult check_expected_tu_continuity(const VerifyOptions& opts) {
  double worst = 0.0;
  for (double mu : {0.5, 1.0, 2.0, 4.0, 9.0}) {
    const double below = opts.expected_tu(mu, 0.5, std::nextafter(1.0 / mu, 0.0));
    const double at = opts.expected_tu(mu, 0.5, 1.0 / mu);
    worst = std::max({worst, std::abs(below - at), std::abs(at - 1.0 / (std::numbers::e * mu))});
  }
  return make_check("expected_tu_branch_continuity", worst, 0.0, 1e-9);
}

CheckResult check_efficiency_identity(const VerifyOptions& opts) {
  double worst = 0.0;
  for (double mu : {0.5, 1.0, 3.0, 9.0}) {
    for (double a : {0.0, 0.25, 1.0 / mu}) {
      for (double f : {0.0, 0.01, 0.3, 0.99, 1.0, 3.0}) {
        const double rtt = f / mu;
        const double direct = theory::efficiency_theoretical(mu, a, rtt);
        const double via_tu = 1.0 - opts.expected_tu(mu, a, rtt) / (a + 1.0 / mu);
        worst = std::max(worst, std::abs(direct - via_tu));
      }
    }
  }
  return make_check("efficiency_matches_expected_tu", worst, 0.0, 1e-12);
}

CheckResult check_idle_condition_equivalence(const VerifyOptions& opts) {
  Rng rng = make_rng(opts.seed, Stream::kTheory, 11);
  std::uniform_int_distribution<std::size_t> len(1, opts.prefix_max_len);
  std::uniform_real_distribution<double> mu_dist(0.5, 5.0), a_dist(0.0, 1.0);
  std::size_t mismatches = 0;
  for (std::size_t k = 0; k < opts.prefix_samples; ++k) {
    const double mu = mu_dist(rng), a = a_dist(rng);
    std::exponential_distribution<double> exp(mu);
    std::vector<double> betas(len(rng));
    for (double& b : betas) b = a + exp(rng);
    const double mean = a + 1.0 / mu;
    const bool condition = theory::idle_prefix_condition(betas, mean);
    const bool model = theory::tu_model(betas, mean, INFINITY).back() > 0.0;
    mismatches += condition != model ? 1 : 0;
  }
  return make_check("idle_condition_mismatches", static_cast<double>(mismatches), 0.0, 0.0);
}

std::vector<CheckResult> check_idle_probability_trend(const VerifyOptions& opts) {
  const double mu = 2.0, a = 0.5;
  std::vector<double> p;
  for (std::size_t i = 1; i <= opts.pr_max_i; ++i) {
    p.push_back(theory::pr_tu_positive_mc(i, mu, a, opts.pr_samples, opts.seed));
  }
  const double n = static_cast<double>(opts.pr_samples);
  double worst_rise = -INFINITY;
  std::size_t violations = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double sigma = std::sqrt(p[i - 1] * (1 - p[i - 1]) / n + p[i] * (1 - p[i]) / n);
    const double rise = p[i] - p[i - 1];
    worst_rise = std::max(worst_rise, rise / std::max(sigma, 1e-12));
    if (rise > 2.0 * sigma) ++violations;
  }
  const double first = 1.0 - 1.0 / std::numbers::e;
  std::vector<CheckResult> out;
  out.push_back(make_check("pr_tu_positive_i1", p.front(), first, 0.01 * first));
  CheckResult trend = make_check("pr_tu_positive_nonincreasing", static_cast<double>(violations),
                                 0.0, 0.0);
  char buf[96];
  std::snprintf(buf, sizeof buf, "largest rise %.2f sigma, p_1=%.4f p_%zu=%.4f", worst_rise,
                p.front(), p.size(), p.back());
  trend.detail = buf;
  out.push_back(trend);
  CheckResult drop = make_check("pr_tu_positive_drop", p.front() - p.back(), 0.0, 0.0);
  drop.pass = p.back() < p.front();
  out.push_back(drop);
  return out;
}

CheckResult check_prediction_consistency() {
  const std::vector<double> means = {1.0, 2.0, 4.0, 0.7, 3.3};
  const double t = theory::predict_t_c3p(means, 1000, 50);
  const std::vector<double> r = theory::predict_r_c3p(means, 1000, 50);
  double worst = 0.0, total = 0.0;
  for (std::size_t n = 0; n < means.size(); ++n) {
    worst = std::max(worst, std::abs(r[n] * means[n] - t));
    total += r[n];
  }
  worst = std::max(worst, std::abs(total - 1050.0));
  return make_check("t_c3p_equals_r_times_mean", worst, 0.0, 1e-9);
}

std::vector<CheckResult> check_examples() {
  std::vector<CheckResult> out;
  const ThreeRowReplay e1 = replay_three_row();
  out.push_back(make_check("three_row_naive_uncoded", e1.naive, 20.0, 1e-12));
  out.push_back(make_check("three_row_coded_equal", e1.coded_equal, 6.0, 1e-12));
  out.push_back(make_check("three_row_heterogeneity_aware", e1.heterogeneity_aware, 4.0, 1e-12));
  out.push_back(make_check("three_row_oracle", e1.oracle, 4.0, 1e-12));
  for (EstimatorMode mode : {EstimatorMode::kInferred, EstimatorMode::kTimestamped}) {
    const IrregularTapeReplay e2 = replay_irregular_tape(mode);
    const std::string suffix = mode == EstimatorMode::kInferred ? "" : "_timestamped";
    out.push_back(make_check("irregular_tape_rr" + suffix, e2.rr, 5.0, 1e-12));
    out.push_back(make_check("irregular_tape_c3p" + suffix, e2.c3p, 3.5, 1e-12));
  }
  return out;
}

VerifyReport run_verification(const VerifyOptions& opts) {
  VerifyReport report;
  report.checks.push_back(check_expected_tu_mc(opts));
  report.checks.push_back(check_expected_tu_continuity(opts));
  report.checks.push_back(check_efficiency_identity(opts));
  report.checks.push_back(check_idle_condition_equivalence(opts));
  for (CheckResult& c : check_idle_probability_trend(opts)) report.checks.push_back(std::move(c));
  report.checks.push_back(check_prediction_consistency());
  if (opts.include_examples) {
    for (CheckResult& c : check_examples()) report.checks.push_back(std::move(c));
  }
  return report;
}

}  // namespace c3sim
