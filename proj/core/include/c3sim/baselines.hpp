#pragma once

// Comparison schedulers: a-priori allocations (static, uncoded, block-coded),
// the runtime-aware oracle, and repetition coding with round-robin dispatch.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "c3sim/c3p.hpp"
#include "c3sim/engine.hpp"
#include "c3sim/workload.hpp"

namespace c3sim {

// Integer split of `total` proportional to `weights` with the largest
// fractional parts rounded up; ties go to the lower index.
std::vector<std::size_t> largest_remainder(std::span<const double> weights, std::size_t total);

struct StaticAllocation {
  std::vector<double> real;     // R / (E_n * sum 1/E_k)
  std::vector<std::size_t> r;   // integerized, sums to R
  Seconds t_static = 0.0;       // R / sum 1/E_k
};

StaticAllocation static_allocate(std::span<const double> mean_betas, std::size_t rows);

// r_n proportional to 1 / E_n, integerized by largest remainder.
std::vector<std::size_t> uncoded_allocate(std::span<const double> mean_betas, std::size_t rows);

// l_n = ceil((R + K) / (E_n * sum 1/E_k)).
std::vector<std::size_t> block_coded_allocate(std::span<const double> mean_betas,
                                              std::size_t total);

// Sends a fixed number of packets to every helper back to back at t = 0 and
// stops once `target` results have arrived. Uncoded wait-for-all schemes use
// target = sum of the allocation.
class BlockScheduler final : public Scheduler {
 public:
  BlockScheduler(std::string name, std::vector<std::size_t> allocation, std::size_t target,
                 std::optional<std::size_t> coded_rows = std::nullopt);

  std::string name() const override { return name_; }
  void on_start(Dispatcher& d) override;
  bool on_result(Dispatcher& d, const ResultReport& result) override;
  std::optional<std::size_t> coding_overhead() const override;

 private:
  std::string name_;
  std::vector<std::size_t> allocation_;
  std::size_t target_;
  std::optional<std::size_t> coded_rows_;
  std::size_t received_ = 0;
};

BlockScheduler make_static_scheduler(std::span<const double> mean_betas, std::size_t rows);
BlockScheduler make_uncoded_scheduler(std::span<const double> mean_betas, std::size_t rows);
BlockScheduler make_hcmm_like_scheduler(std::span<const double> mean_betas, std::size_t rows,
                                        std::size_t overhead);

// Knows every runtime and link delay on the tape and sends each packet so it
// lands as the previous one finishes: Tx_{i+1} = max(Tx_i, end_i - up_{i+1}).
class NonErgodicOracle final : public Scheduler {
 public:
  NonErgodicOracle(RuntimeTape& tape, PacketSizes sizes, CollectorConfig collector);

  std::string name() const override { return "nonergodic"; }
  void on_start(Dispatcher& d) override;
  void on_send_due(Dispatcher& d, HelperId n) override;
  bool on_result(Dispatcher& d, const ResultReport& result) override;
  std::optional<std::size_t> coding_overhead() const override { return collector_.overhead(); }

 private:
  struct Plan {
    std::size_t sent = 0;
    Seconds last_tx = 0.0;
    Seconds last_arrival = 0.0;
    Seconds last_end = 0.0;
  };

  void send_and_plan(Dispatcher& d, HelperId n);

  RuntimeTape& tape_;
  PacketSizes sizes_;
  CodedCollector collector_;
  std::vector<Plan> plans_;
};

// Uncoded rows dispatched in order from the live set with wrap-around
// repetition; each helper is paced by the same TTI rule as C3P.
class RepetitionRoundRobin final : public CadenceScheduler {
 public:
  RepetitionRoundRobin(CadenceParams params, std::size_t rows);

  std::string name() const override { return "rr"; }
  std::size_t live() const { return live_count_; }
  std::size_t duplicates() const { return duplicates_; }

 protected:
  std::optional<std::uint64_t> next_tag(HelperId n) override;
  bool consume(const ResultReport& result) override;
  bool finished() const override { return live_count_ == 0; }

 private:
  std::vector<bool> live_;
  std::size_t live_count_;
  std::size_t cursor_ = 0;
  std::size_t duplicates_ = 0;
};

// min over integer splits of max_n (rtt_n + sum_{i <= r_n} beta_{n,i}) with
// sum r_n = total. Exhaustive; meant for a handful of helpers.
Seconds nonergodic_bruteforce(const std::vector<std::vector<double>>& betas,
                              std::span<const double> rtt, std::size_t total);

}  // namespace c3sim
