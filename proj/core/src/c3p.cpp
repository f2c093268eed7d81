#include "c3sim/c3p.hpp"

#include <algorithm>
#include <cmath>

#include "c3sim/errors.hpp"

namespace c3sim {

std::string_view to_string(StopMode mode) {
  return mode == StopMode::kIdealized ? "idealized" : "realistic";
}

StopMode parse_stop_mode(std::string_view text) {
  if (text == "idealized") return StopMode::kIdealized;
  if (text == "realistic") return StopMode::kRealistic;
  throw ConfigError("unknown stop mode '" + std::string(text) + "'");
}

std::string_view to_string(EstimatorMode mode) {
  return mode == EstimatorMode::kTimestamped ? "timestamped" : "inferred";
}

EstimatorMode parse_estimator_mode(std::string_view text) {
  if (text == "timestamped") return EstimatorMode::kTimestamped;
  if (text == "inferred") return EstimatorMode::kInferred;
  throw ConfigError("unknown estimator mode '" + std::string(text) + "'");
}

std::size_t overhead_count(std::size_t rows, double fraction) {
  if (!(fraction >= 0.0) || !std::isfinite(fraction)) {
    throw ConfigError("overhead fraction must be finite and >= 0");
  }
  const double k = fraction * static_cast<double>(rows);
  const double nearest = std::round(k);
  if (std::abs(k - nearest) < 1e-9) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(k));
}

void CollectorConfig::validate() const {
  if (rows == 0) throw ConfigError("collector needs R >= 1");
  overhead_count(rows, overhead_fraction);
  soliton.validate();
}

CodedCollector::CodedCollector(CollectorConfig config)
    : config_(config), target_(0), rng_(make_rng(config.seed, Stream::kCoding)) {
  config_.validate();
  if (config_.stop == StopMode::kIdealized) {
    target_ = config_.rows + overhead_count(config_.rows, config_.overhead_fraction);
  } else {
    target_ = config_.rows;
    encoder_ = std::make_unique<LtEncoder>(config_.rows, config_.soliton);
    decoder_ = std::make_unique<PeelingDecoder<std::int64_t>>(config_.rows);
  }
}

std::uint64_t CodedCollector::next_tag() {
  if (!encoder_) return issued_++;
  CodedSymbol symbol = encoder_->next(rng_);
  symbols_.push_back(std::move(symbol.sources));
  ++issued_;
  return symbol.coded_id;
}

bool CodedCollector::consume(std::uint64_t tag) {
  if (tag >= issued_) throw StateError("result for a coded packet that was never issued");
  ++consumed_;
  if (decoder_) {
    // Only the structure matters for completion; the all-zero task is exact.
    decoder_->add(std::span<const SourceIndex>(symbols_[tag]), 0);
    symbols_[tag].clear();
    symbols_[tag].shrink_to_fit();
  }
  return true;
}

bool CodedCollector::done() const {
  if (decoder_) return decoder_->complete();
  return consumed_ >= target_;
}

std::optional<std::size_t> CodedCollector::overhead() const {
  if (!done()) return std::nullopt;
  return consumed_ - config_.rows;
}

double tti_update(CollectorHelperState& s, Seconds tr, Seconds tx, double floor) {
  if (tr < tx) throw TraceCorruption("result received before its packet was sent");
  if (s.m == 0 || std::isnan(s.est_mean_beta)) {
    throw StateError("TTI update needs a runtime estimate");
  }
  s.tti = std::max(floor, std::min(tr - tx, s.est_mean_beta));
  s.timeout = 2.0 * s.tti;
  s.next_send = s.last_tx + s.tti;
  return s.tti;
}

double on_timeout(CollectorHelperState& s) {
  s.tti *= 2.0;
  s.timeout = 2.0 * s.tti;
  ++s.timeouts;
  return s.tti;
}

double estimate_beta_timestamped(CollectorHelperState& s, double beta) {
  if (s.m == 0) throw StateError("runtime estimate needs at least one result");
  s.beta_sum += beta;
  s.est_mean_beta = s.beta_sum / static_cast<double>(s.m);
  return s.est_mean_beta;
}

double rtt_data_from_ack(double rtt_ack, const PacketSizes& sizes) {
  return (sizes.data_bits + sizes.result_bits) / (sizes.data_bits + sizes.ack_bits) * rtt_ack;
}

double infer_rtt_data(CollectorHelperState& s, double rtt_ack, const PacketSizes& sizes,
                      double alpha) {
  const double sample = rtt_data_from_ack(rtt_ack, sizes);
  s.rtt_data_ewma = s.rtt_data_ewma ? alpha * sample + (1.0 - alpha) * *s.rtt_data_ewma : sample;
  return *s.rtt_data_ewma;
}

double mean_beta_from_busy(Seconds tc, double tu_hat, std::size_t m) {
  if (m == 0) throw StateError("runtime estimate needs at least one result");
  return (tc - tu_hat) / static_cast<double>(m);
}

double infer_update_on_result(CollectorHelperState& s, Seconds tr, Seconds tx,
                              const PacketSizes& sizes) {
  if (s.m == 0) throw StateError("runtime estimate needs at least one result");
  if (tr < tx) throw TraceCorruption("result received before its packet was sent");
  const double rtt = s.rtt_data_ewma.value_or(0.0);
  if (s.m == 1) {
    s.tu_hat = 0.0;
    s.first_tx = tx;
    s.est_mean_beta = std::max(0.0, tr - tx - rtt);
  } else {
    const double xtt = s.last_tr - tx;
    s.tu_hat += std::max(0.0, rtt - xtt);
    const Seconds tc = tr - sizes.result_bits / (sizes.data_bits + sizes.result_bits) * rtt;
    s.est_mean_beta = std::max(0.0, mean_beta_from_busy(tc - s.first_tx, s.tu_hat, s.m));
  }
  s.last_tr = tr;
  return s.est_mean_beta;
}

void CadenceParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (!(tti_floor > 0.0)) throw ConfigError("TTI floor must be positive");
  sizes.validate();
}

CadenceScheduler::CadenceScheduler(CadenceParams params) : params_(params) { params_.validate(); }

void CadenceScheduler::on_start(Dispatcher& d) {
  states_.assign(d.helper_count(), CollectorHelperState{});
  for (HelperId n = 0; n < states_.size(); ++n) {
    dispatch(d, n);
    if (finished()) return;
  }
}

void CadenceScheduler::dispatch(Dispatcher& d, HelperId n) {
  const std::optional<std::uint64_t> tag = next_tag(n);
  if (!tag) return;
  CollectorHelperState& s = states_[n];
  const std::size_t index = d.send(n, *tag);
  if (s.tx.size() + 1 != index) throw StateError("per-helper packet index out of step");
  s.tx.push_back(d.now());
  s.last_tx = d.now();
}

void CadenceScheduler::reschedule(Dispatcher& d, HelperId n) {
  CollectorHelperState& s = states_[n];
  s.next_send = s.tti == kNever ? kNever : std::max(d.now(), s.last_tx + s.tti);
  d.wake_at(n, s.next_send);
}

void CadenceScheduler::on_send_due(Dispatcher& d, HelperId n) {
  dispatch(d, n);
  reschedule(d, n);
}

void CadenceScheduler::on_transmission_ack(Dispatcher& d, HelperId n, std::size_t index) {
  if (params_.estimator != EstimatorMode::kInferred) return;
  CollectorHelperState& s = states_.at(n);
  infer_rtt_data(s, d.now() - s.tx.at(index - 1), params_.sizes, params_.alpha);
}

bool CadenceScheduler::on_result(Dispatcher& d, const ResultReport& result) {
  const bool useful = consume(result);
  if (finished()) {
    d.stop();
    return useful;
  }
  CollectorHelperState& s = states_.at(result.helper);
  ++s.m;
  const Seconds tx = s.tx.at(result.index - 1);
  if (params_.estimator == EstimatorMode::kTimestamped) {
    estimate_beta_timestamped(s, result.runtime);
    s.last_tr = result.arrived_at;
  } else {
    infer_update_on_result(s, result.arrived_at, tx, params_.sizes);
  }
  tti_update(s, result.arrived_at, tx, params_.tti_floor);
  d.arm_timeout(result.helper, d.now() + s.timeout);
  reschedule(d, result.helper);
  return useful;
}

void CadenceScheduler::on_timeout(Dispatcher& d, HelperId n) {
  CollectorHelperState& s = states_.at(n);
  if (s.tti == kNever) return;
  c3sim::on_timeout(s);
  d.arm_timeout(n, d.now() + s.timeout);
  reschedule(d, n);
}

C3pScheduler::C3pScheduler(C3pConfig config)
    : CadenceScheduler(config.cadence), collector_(config.collector) {}

std::optional<std::uint64_t> C3pScheduler::next_tag(HelperId) { return collector_.next_tag(); }

bool C3pScheduler::consume(const ResultReport& result) { return collector_.consume(result.tag); }

}  // namespace c3sim
