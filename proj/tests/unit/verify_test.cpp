#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "c3sim/verify.hpp"

using namespace c3sim;

namespace {

VerifyOptions quick() {
  VerifyOptions o;
  o.tu_samples = 200'000;
  o.tu_triples = 10;
  o.prefix_samples = 2000;
  o.pr_samples = 50'000;
  return o;
}

}  // namespace

TEST(Verify, CleanBuildPasses) {
  const VerifyReport r = run_verification(quick());
  for (const CheckResult& c : r.checks) EXPECT_TRUE(c.pass) << c.name << " " << c.detail;
  EXPECT_TRUE(r.all_passed());
}

TEST(Verify, MutatedClosedFormIsCaught) {
  VerifyOptions o = quick();
  // The saturated branch with 1/(2 e mu) instead of 1/(e mu).
  o.expected_tu = [](double mu, double a, double rtt) {
    const double base = theory::expected_tu(mu, a, rtt);
    return rtt >= 1.0 / mu ? base / 2.0 : base;
  };
  EXPECT_FALSE(check_expected_tu_mc(o).pass);
  EXPECT_FALSE(check_expected_tu_continuity(o).pass);
  EXPECT_FALSE(run_verification(o).all_passed());
}

TEST(Verify, ExampleReplays) {
  const ThreeRowReplay e1 = replay_three_row();
  EXPECT_EQ(e1.naive, 20.0);
  EXPECT_EQ(e1.coded_equal, 6.0);
  EXPECT_EQ(e1.heterogeneity_aware, 4.0);
  const IrregularTapeReplay e2 = replay_irregular_tape(EstimatorMode::kTimestamped);
  EXPECT_EQ(e2.rr, 5.0);
  EXPECT_EQ(e2.c3p, 3.5);
}

TEST(Verify, ReportFormats) {
  VerifyReport r;
  r.checks.push_back(CheckResult{"alpha", true, 1.0, 1.0, 0.0, ""});
  r.checks.push_back(CheckResult{"beta", false, 2.0, 1.0, 0.5, "why"});
  std::ostringstream txt, csv;
  r.write_text(txt);
  r.write_csv(csv);
  EXPECT_NE(txt.str().find("[FAIL] beta"), std::string::npos);
  EXPECT_NE(txt.str().find("1/2 checks passed"), std::string::npos);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "check,pass,measured,expected,tolerance");
  EXPECT_FALSE(r.all_passed());
  EXPECT_FALSE(VerifyReport{}.all_passed());
}
