#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "c3sim/baselines.hpp"
#include "c3sim/engine.hpp"
#include "c3sim/errors.hpp"
#include "c3sim/theory.hpp"

using namespace c3sim;
using namespace c3sim::theory;

namespace {

// Sends one packet to a single helper every `period` seconds, zero channel.
struct Periodic : Scheduler {
  double period;
  std::size_t count;
  std::size_t sent = 0, received = 0;
  Periodic(double p, std::size_t c) : period(p), count(c) {}
  std::string name() const override { return "periodic"; }
  void on_start(Dispatcher& d) override { on_send_due(d, 0); }
  void on_send_due(Dispatcher& d, HelperId n) override {
    d.send(n, sent++);
    if (sent < count) d.wake_at(n, d.now() + period);
  }
  bool on_result(Dispatcher& d, const ResultReport&) override {
    if (++received == count) d.stop();
    return true;
  }
};

}  // namespace

TEST(Predict, HarmonicExample) {
  const std::vector<double> means{1.0, 2.0, 4.0};
  EXPECT_DOUBLE_EQ(predict_t_c3p(means, 7, 0), 4.0);
  EXPECT_DOUBLE_EQ(predict_t_c3p(means, 6, 1), 4.0);
  const auto r = predict_r_c3p(means, 6, 1);
  EXPECT_DOUBLE_EQ(r[0], 4.0);
  EXPECT_DOUBLE_EQ(r[1], 2.0);
  EXPECT_DOUBLE_EQ(r[2], 1.0);
}

TEST(Predict, ZeroOverheadMatchesStatic) {
  const std::vector<double> means{0.7, 1.9, 3.2, 1.1};
  const StaticAllocation a = static_allocate(means, 900);
  EXPECT_DOUBLE_EQ(predict_t_c3p(means, 900, 0), a.t_static);
  const auto r = predict_r_c3p(means, 900, 0);
  for (std::size_t n = 0; n < means.size(); ++n) EXPECT_NEAR(r[n], a.real[n], 1e-9);
}

TEST(Predict, EqualHelpers) {
  const std::vector<double> means(5, 2.0);
  for (double r : predict_r_c3p(means, 95, 5)) EXPECT_DOUBLE_EQ(r, 20.0);
}

TEST(ExpectedTu, ZeroRtt) { EXPECT_EQ(expected_tu(2.0, 0.5, 0.0), 0.0); }

TEST(ExpectedTu, SaturatedBranch) {
  EXPECT_NEAR(expected_tu(2.0, 0.5, 0.5), 1.0 / (2.0 * std::numbers::e), 1e-12);
  EXPECT_NEAR(expected_tu(2.0, 0.5, 7.0), 0.18394, 1e-5);
}

TEST(ExpectedTu, BranchesMeetAtInverseRate) {
  for (double mu : {0.5, 1.0, 3.0, 9.0}) {
    EXPECT_NEAR(expected_tu(mu, 0.2, std::nextafter(1.0 / mu, 0.0)), expected_tu(mu, 0.2, 1.0 / mu), 1e-12);
  }
}

TEST(ExpectedTu, AgreesWithMonteCarlo) {
  for (auto [mu, a, rtt] : {std::tuple{2.0, 0.5, 0.1}, {1.0, 1.0, 0.7}, {9.0, 0.0, 0.5}, {3.0, 0.3, 0.0}}) {
    EXPECT_NEAR(expected_tu(mu, a, rtt), expected_tu_mc(mu, a, rtt, 1'000'000, 99), 1e-2);
  }
}

TEST(Efficiency, ZeroRttIsOne) { EXPECT_EQ(efficiency_theoretical(3.0, 0.2, 0.0), 1.0); }

TEST(Efficiency, ShiftEqualsInverseRateFloor) {
  const double e = std::numbers::e;
  for (double mu : {1.0, 3.0, 9.0}) {
    EXPECT_NEAR(efficiency_theoretical(mu, 1.0 / mu, 5.0 / mu), (2 * e - 1) / (2 * e), 1e-12);
  }
}

TEST(Efficiency, IdentityAndRange) {
  for (double mu : {0.5, 2.0, 7.0}) {
    for (double a : {0.0, 0.4, 2.0}) {
      for (double rtt : {1e-6, 0.05, 0.3, 1.0, 10.0}) {
        const double g = efficiency_theoretical(mu, a, rtt);
        EXPECT_GT(g, 0.0);
        EXPECT_LE(g, 1.0);
        EXPECT_NEAR(g, 1.0 - expected_tu(mu, a, rtt) / (a + 1.0 / mu), 1e-12);
      }
    }
    EXPECT_NEAR(efficiency_theoretical(mu, 0.4, 1e-9), 1.0, 1e-6);
  }
}

TEST(Efficiency, InvalidParameters) {
  EXPECT_THROW(expected_tu(0.0, 0.1, 0.1), ConfigError);
  EXPECT_THROW(expected_tu(1.0, -0.1, 0.1), ConfigError);
  EXPECT_THROW(expected_tu(1.0, 0.1, -0.1), ConfigError);
}

TEST(Queue, RecursionExamples) {
  const std::vector<double> b1{3.5}, b2{1.0};
  EXPECT_EQ(tq_trace(b1, 2.0), (std::vector<double>{0.0, 1.5}));
  EXPECT_EQ(tq_trace(b2, 2.0), (std::vector<double>{0.0, 0.0}));
}

TEST(Queue, MatchesEngineWaitingTime) {
  Rng rng(5);
  const ShiftedExponential dist{0.2, 1.5};
  const double mean = dist.mean();
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> betas(300);
    for (double& b : betas) b = dist.sample(rng);
    RuntimeTape tape = RuntimeTape::from_runtimes({betas});
    Periodic s(mean, betas.size());
    const RunResult r = Engine(tape, EngineConfig{PacketSizes::for_rows(300), 1'000'000, false}).run(s);
    const auto tq = tq_trace(betas, mean);
    for (std::size_t i = 0; i < betas.size(); ++i) {
      const PacketRecord& p = r.trace.packets[0][i];
      ASSERT_NEAR(p.start - p.arrival, tq[i], 1e-9) << i;
    }
  }
}

TEST(IdleModel, CaseExamples) {
  const std::vector<double> b1{1.0}, b2{1.8}, b3{2.5};
  EXPECT_NEAR(tu_model(b1, 2.0, 0.5).back(), 0.5, 1e-12);
  EXPECT_NEAR(tu_model(b2, 2.0, 0.5).back(), 0.2, 1e-12);
  EXPECT_EQ(tu_model(b3, 2.0, 0.5).back(), 0.0);
  EXPECT_EQ(tu_model(b1, 2.0, 0.5).front(), 0.0);
}

TEST(IdlePrefixCondition, HandExample) {
  const std::vector<double> b{2.2, 1.5};
  EXPECT_TRUE(idle_prefix_condition(b, 2.0));
  EXPECT_NEAR(tu_model(b, 2.0, INFINITY).back(), 0.3, 1e-12);
  const std::vector<double> slow{1.0, 2.0};
  EXPECT_FALSE(idle_prefix_condition(slow, 2.0));
}

TEST(IdlePrefixCondition, RandomPrefixEquivalence) {
  Rng rng(77);
  std::uniform_int_distribution<int> len(1, 20);
  for (int k = 0; k < 10'000; ++k) {
    const ShiftedExponential dist{0.3, 1.7};
    std::vector<double> b(len(rng));
    for (double& x : b) x = dist.sample(rng);
    ASSERT_EQ(idle_prefix_condition(b, dist.mean()), tu_model(b, dist.mean(), INFINITY).back() > 0.0);
  }
}

TEST(IdleProbability, FirstPacketProbability) {
  for (auto [mu, a] : {std::pair{2.0, 0.5}, {1.0, 0.0}, {9.0, 1.0 / 9.0}}) {
    EXPECT_NEAR(pr_tu_positive_mc(1, mu, a, 100'000, 3), 1.0 - 1.0 / std::numbers::e, 0.01);
  }
}

TEST(IdleProbability, DecreasesOverPackets) {
  const double p1 = pr_tu_positive_mc(1, 2.0, 0.5, 100'000, 3);
  const double p30 = pr_tu_positive_mc(30, 2.0, 0.5, 100'000, 3);
  EXPECT_LT(p30, p1 - 0.1);
}
