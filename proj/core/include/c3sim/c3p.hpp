#pragma once

// The C3P collector: per-helper transmission intervals adapted from returned
// results, runtime estimation from timestamps or from ACK timing, and timeout
// doubling for unresponsive helpers.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "c3sim/codec.hpp"
#include "c3sim/engine.hpp"
#include "c3sim/workload.hpp"

namespace c3sim {

enum class StopMode { kIdealized, kRealistic };
enum class EstimatorMode { kTimestamped, kInferred };

std::string_view to_string(StopMode mode);
StopMode parse_stop_mode(std::string_view text);
std::string_view to_string(EstimatorMode mode);
EstimatorMode parse_estimator_mode(std::string_view text);

// K = ceil(fraction * R), robust to floating point noise in the product.
std::size_t overhead_count(std::size_t rows, double fraction);

struct CollectorConfig {
  std::size_t rows = 0;
  StopMode stop = StopMode::kIdealized;
  double overhead_fraction = 0.05;
  SolitonParams soliton;
  std::uint64_t seed = 0;

  void validate() const;
};

// Issues coded packet tags and consumes returned results. Idealized mode
// counts to R+K; realistic mode feeds the structure of each coded packet to a
// peeling decoder and finishes when all R rows are recovered.
class CodedCollector {
 public:
  explicit CodedCollector(CollectorConfig config);

  std::uint64_t next_tag();
  bool consume(std::uint64_t tag);
  bool done() const;

  std::size_t consumed() const { return consumed_; }
  std::size_t target() const { return target_; }
  std::size_t rows() const { return config_.rows; }
  std::optional<std::size_t> overhead() const;

 private:
  CollectorConfig config_;
  std::size_t target_;
  std::size_t consumed_ = 0;
  std::uint64_t issued_ = 0;
  std::unique_ptr<LtEncoder> encoder_;
  std::unique_ptr<PeelingDecoder<std::int64_t>> decoder_;
  std::vector<std::vector<SourceIndex>> symbols_;
  Rng rng_;
};

struct CollectorHelperState {
  Seconds tti = kNever;
  Seconds timeout = kNever;
  double est_mean_beta = std::numeric_limits<double>::quiet_NaN();
  std::size_t m = 0;
  std::optional<double> rtt_data_ewma;
  double tu_hat = 0.0;
  double beta_sum = 0.0;
  Seconds first_tx = 0.0;
  Seconds last_tr = std::numeric_limits<double>::quiet_NaN();
  Seconds last_tx = 0.0;
  Seconds next_send = kNever;
  std::vector<Seconds> tx;  // per 1-based packet index
  std::size_t timeouts = 0;
};

inline constexpr double kDefaultTtiFloor = 1e-9;

// TTI = min(Tr - Tx, E[beta]); TO = 2 TTI; next send = last Tx + TTI.
double tti_update(CollectorHelperState& s, Seconds tr, Seconds tx,
                  double floor = kDefaultTtiFloor);

// Doubles TTI and resets TO = 2 TTI.
double on_timeout(CollectorHelperState& s);

// Running mean of reported runtimes; s.m must already count this result.
double estimate_beta_timestamped(CollectorHelperState& s, double beta);

// RTT^data = (B_x + B_r) / (B_x + B_ack) * RTT^ack.
double rtt_data_from_ack(double rtt_ack, const PacketSizes& sizes);

// Folds one receipt-ACK measurement into the RTT^data EWMA.
double infer_rtt_data(CollectorHelperState& s, double rtt_ack, const PacketSizes& sizes,
                      double alpha);

// (Tc - Tu) / m
double mean_beta_from_busy(Seconds tc, double tu_hat, std::size_t m);

// Alg. 2 style update after result i from Tr_i and Tx_i; s.m must already
// count this result. The first result primes the estimate with Tt - RTT.
double infer_update_on_result(CollectorHelperState& s, Seconds tr, Seconds tx,
                              const PacketSizes& sizes);

struct CadenceParams {
  EstimatorMode estimator = EstimatorMode::kInferred;
  double alpha = 0.125;
  PacketSizes sizes;
  double tti_floor = kDefaultTtiFloor;

  void validate() const;
};

// Shared TTI/timeout machinery for schedulers that pace each helper by its
// own returned results (C3P and repetition round robin).
class CadenceScheduler : public Scheduler {
 public:
  explicit CadenceScheduler(CadenceParams params);

  void on_start(Dispatcher& d) override;
  void on_send_due(Dispatcher& d, HelperId n) override;
  void on_transmission_ack(Dispatcher& d, HelperId n, std::size_t index) override;
  bool on_result(Dispatcher& d, const ResultReport& result) override;
  void on_timeout(Dispatcher& d, HelperId n) override;

  const std::vector<CollectorHelperState>& states() const { return states_; }
  const CadenceParams& params() const { return params_; }

 protected:
  virtual std::optional<std::uint64_t> next_tag(HelperId n) = 0;
  virtual bool consume(const ResultReport& result) = 0;
  virtual bool finished() const = 0;

 private:
  void dispatch(Dispatcher& d, HelperId n);
  void reschedule(Dispatcher& d, HelperId n);

  CadenceParams params_;
  std::vector<CollectorHelperState> states_;
};

struct C3pConfig {
  CadenceParams cadence;
  CollectorConfig collector;
};

class C3pScheduler final : public CadenceScheduler {
 public:
  explicit C3pScheduler(C3pConfig config);

  std::string name() const override { return "c3p"; }
  std::optional<std::size_t> coding_overhead() const override { return collector_.overhead(); }
  const CodedCollector& collector() const { return collector_; }

 protected:
  std::optional<std::uint64_t> next_tag(HelperId n) override;
  bool consume(const ResultReport& result) override;
  bool finished() const override { return collector_.done(); }

 private:
  CodedCollector collector_;
};

}  // namespace c3sim
