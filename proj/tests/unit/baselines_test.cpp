#include <gtest/gtest.h>

#include <numeric>

#include "c3sim/baselines.hpp"
#include "c3sim/errors.hpp"
#include "c3sim/verify.hpp"

using namespace c3sim;

namespace {

double run(RuntimeTape& tape, Scheduler& s, std::size_t rows) {
  return Engine(tape, EngineConfig{PacketSizes::for_rows(rows), 10'000'000, false}).run(s).metrics.t_total;
}

}  // namespace

TEST(Static, HarmonicSplit) {
  const std::vector<double> means{1.0, 2.0, 4.0};
  const StaticAllocation a = static_allocate(means, 7);
  EXPECT_EQ(a.r, (std::vector<std::size_t>{4, 2, 1}));
  EXPECT_DOUBLE_EQ(a.t_static, 4.0);
}

TEST(Static, SymmetricAndSingleHelper) {
  const std::vector<double> equal(5, 1.5);
  EXPECT_EQ(static_allocate(equal, 100).r, std::vector<std::size_t>(5, 20));
  const std::vector<double> one{2.5};
  const StaticAllocation a = static_allocate(one, 40);
  EXPECT_EQ(a.r, std::vector<std::size_t>{40});
  EXPECT_DOUBLE_EQ(a.t_static, 100.0);
}

TEST(Static, NonPositiveMeanRejected) {
  const std::vector<double> bad{1.0, 0.0};
  EXPECT_THROW(static_allocate(bad, 10), ConfigError);
}

TEST(Static, LargestRemainderProperties) {
  Rng rng(3);
  std::uniform_real_distribution<double> w(0.01, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> ws(1 + trial % 17);
    for (double& x : ws) x = w(rng);
    const std::size_t total = 1 + trial * 13;
    const auto r = largest_remainder(ws, total);
    ASSERT_EQ(std::accumulate(r.begin(), r.end(), std::size_t{0}), total);
    const double sum = std::accumulate(ws.begin(), ws.end(), 0.0);
    for (std::size_t i = 0; i < ws.size(); ++i) {
      ASSERT_LT(std::abs(static_cast<double>(r[i]) - total * ws[i] / sum), 1.0);
    }
  }
}

TEST(Static, ThreeRowHeterogeneityAware) {
  const ThreeRowReplay e = replay_three_row();
  EXPECT_EQ(e.static_split, (std::vector<std::size_t>{4, 2, 0}));
  EXPECT_EQ(e.heterogeneity_aware, 4.0);
}

TEST(Static, FixedRuntimeScenarioNearPrediction) {
  PopulationSpec spec;
  spec.scenario = Scenario::kFixedPerHelper;
  double sim = 0.0, pred = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RuntimeTape tape(make_population(spec, seed), ChannelModel{}, seed);
    std::vector<double> means;
    for (const HelperProfile& h : tape.profiles()) means.push_back(h.packet_mean());
    BlockScheduler s = make_static_scheduler(means, 8000);
    sim += run(tape, s, 8000);
    pred += static_allocate(means, 8000).t_static;
  }
  EXPECT_NEAR(sim, pred, 0.05 * pred);
}

TEST(Oracle, ThreeRowCodedEqualSplit) {
  EXPECT_EQ(replay_three_row().coded_equal, 6.0);
}

TEST(Oracle, MatchesExhaustiveSearchOnSmallInstances) {
  Rng rng(19);
  std::uniform_real_distribution<double> b(0.2, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<double>> betas(2, std::vector<double>(4));
    for (auto& lane : betas) {
      for (double& x : lane) x = b(rng);
    }
    RuntimeTape tape = RuntimeTape::from_runtimes(betas);
    NonErgodicOracle s(tape, PacketSizes::for_rows(4), CollectorConfig{4, StopMode::kIdealized, 0.0, {}, 0});
    const std::vector<double> rtt{0.0, 0.0};
    ASSERT_NEAR(run(tape, s, 4), nonergodic_bruteforce(betas, rtt, 4), 1e-12) << trial;
  }
}

TEST(Oracle, NeverSlowerThanC3pOnCoupledTapes) {
  PopulationSpec spec;
  spec.helpers = 30;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RuntimeTape t1(make_population(spec, seed), ChannelModel{}, seed);
    RuntimeTape t2(make_population(spec, seed), ChannelModel{}, seed);
    const CollectorConfig coll{1000, StopMode::kIdealized, 0.05, {}, seed};
    C3pScheduler c3p(C3pConfig{CadenceParams{EstimatorMode::kInferred, 0.125, PacketSizes::for_rows(1000),
                                             kDefaultTtiFloor},
                               coll});
    NonErgodicOracle oracle(t2, PacketSizes::for_rows(1000), coll);
    EXPECT_LE(run(t2, oracle, 1000), run(t1, c3p, 1000));
  }
}

TEST(Uncoded, ThreeRowNaiveSplit) { EXPECT_EQ(replay_three_row().naive, 20.0); }

TEST(Uncoded, EqualMeansEqualSplit) {
  const std::vector<double> means(4, 2.0);
  EXPECT_EQ(uncoded_allocate(means, 12), std::vector<std::size_t>(4, 3));
}

TEST(Uncoded, SlowHelperDominates) {
  RuntimeTape tape = RuntimeTape::from_runtimes({{1.0}, {1.0}, {100.0}});
  const std::vector<double> means{1.0, 1.0, 100.0};
  BlockScheduler s = make_uncoded_scheduler(means, 201);
  const auto alloc = uncoded_allocate(means, 201);
  ASSERT_GE(alloc[2], 1u);
  const double t = run(tape, s, 201);
  EXPECT_GE(t, 100.0 * static_cast<double>(alloc[2]));
}

TEST(RoundRobin, IrregularTapeWastesWorkOnRowThree) {
  const IrregularTapeReplay e = replay_irregular_tape();
  EXPECT_EQ(e.rr, 5.0);
  EXPECT_GE(e.rr_duplicates, 1u);
}

TEST(RoundRobin, SingleHelperMatchesUncoded) {
  const std::vector<std::vector<double>> betas{{0.7, 1.3, 0.4, 2.0, 0.9, 1.1, 0.6, 1.0}};
  RuntimeTape t1 = RuntimeTape::from_runtimes(betas), t2 = RuntimeTape::from_runtimes(betas);
  RepetitionRoundRobin rr(CadenceParams{EstimatorMode::kInferred, 0.125, PacketSizes::for_rows(8),
                                        kDefaultTtiFloor},
                          8);
  BlockScheduler unc("uncoded", {8}, 8);
  EXPECT_EQ(run(t1, rr, 8), run(t2, unc, 8));
  EXPECT_EQ(rr.duplicates(), 0u);
}

TEST(RoundRobin, RepetitionOnlyAfterFullPass) {
  PopulationSpec spec;
  spec.helpers = 10;
  RuntimeTape tape(make_population(spec, 2), ChannelModel{}, 2);
  RepetitionRoundRobin rr(CadenceParams{EstimatorMode::kInferred, 0.125, PacketSizes::for_rows(300),
                                        kDefaultTtiFloor},
                          300);
  const RunResult r = Engine(tape, EngineConfig{PacketSizes::for_rows(300), 10'000'000, true}).run(rr);
  std::vector<std::pair<double, std::uint64_t>> sends;
  for (const auto& lane : r.trace.packets) {
    for (const PacketRecord& p : lane) sends.emplace_back(p.tx, p.tag);
  }
  std::sort(sends.begin(), sends.end());
  std::vector<bool> seen(300, false);
  std::size_t first_pass = 0;
  for (const auto& [tx, tag] : sends) {
    if (first_pass < 300) {
      ASSERT_FALSE(seen[tag]) << "row " << tag << " repeated before the first pass ended";
      seen[tag] = true;
      ++first_pass;
    }
  }
  EXPECT_EQ(first_pass, 300u);
  EXPECT_EQ(rr.live(), 0u);
}

TEST(BlockCoded, EqualHelpersSplitEvenly) {
  const std::vector<double> means(4, 1.0);
  EXPECT_EQ(block_coded_allocate(means, 420), std::vector<std::size_t>(4, 105));
}

TEST(BlockCoded, DeterministicRuntimesHitPrediction) {
  const std::vector<double> means{1.0, 2.0, 4.0};
  RuntimeTape tape = RuntimeTape::from_runtimes({{1.0}, {2.0}, {4.0}});
  BlockScheduler s = make_hcmm_like_scheduler(means, 6, 1);
  EXPECT_DOUBLE_EQ(run(tape, s, 6), 4.0);
}

TEST(BlockCoded, StallingHelperNoFasterThanStatic) {
  PopulationSpec spec;
  spec.helpers = 20;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RuntimeTape tape(make_population(spec, seed), ChannelModel{}, seed);
    std::vector<double> means;
    for (const HelperProfile& h : tape.profiles()) means.push_back(h.packet_mean());
    BlockScheduler s = make_hcmm_like_scheduler(means, 1000, 50);
    EXPECT_GE(run(tape, s, 1000), static_allocate(means, 1000).t_static);
  }
}
