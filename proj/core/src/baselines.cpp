#include "c3sim/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "c3sim/errors.hpp"

namespace c3sim {

namespace {

double harmonic_sum(std::span<const double> means) {
  if (means.empty()) throw ConfigError("allocation needs at least one helper");
  double sum = 0.0;
  for (double e : means) {
    if (!(e > 0.0) || !std::isfinite(e)) throw ConfigError("mean runtimes must be positive");
    sum += 1.0 / e;
  }
  return sum;
}

std::vector<double> inverse(std::span<const double> means) {
  std::vector<double> w;
  w.reserve(means.size());
  for (double e : means) w.push_back(1.0 / e);
  return w;
}

}  // namespace

std::vector<std::size_t> largest_remainder(std::span<const double> weights, std::size_t total) {
  if (weights.empty()) throw ConfigError("largest remainder needs at least one weight");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("weights must be finite and >= 0");
    sum += w;
  }
  if (!(sum > 0.0)) throw ConfigError("weights must not all be zero");

  std::vector<std::size_t> out(weights.size());
  std::vector<double> frac(weights.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double real = static_cast<double>(total) * weights[i] / sum;
    const double whole = std::floor(real);
    out[i] = static_cast<std::size_t>(whole);
    frac[i] = real - whole;
    assigned += out[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t k = 0; assigned < total; k = (k + 1) % order.size()) {
    ++out[order[k]];
    ++assigned;
  }
  return out;
}

StaticAllocation static_allocate(std::span<const double> mean_betas, std::size_t rows) {
  const double h = harmonic_sum(mean_betas);
  StaticAllocation a;
  a.t_static = static_cast<double>(rows) / h;
  for (double e : mean_betas) a.real.push_back(static_cast<double>(rows) / (e * h));
  const std::vector<double> w = inverse(mean_betas);
  a.r = largest_remainder(w, rows);
  return a;
}

std::vector<std::size_t> uncoded_allocate(std::span<const double> mean_betas, std::size_t rows) {
  harmonic_sum(mean_betas);
  const std::vector<double> w = inverse(mean_betas);
  return largest_remainder(w, rows);
}

std::vector<std::size_t> block_coded_allocate(std::span<const double> mean_betas,
                                              std::size_t total) {
  const double h = harmonic_sum(mean_betas);
  std::vector<std::size_t> out;
  for (double e : mean_betas) {
    const double real = static_cast<double>(total) / (e * h);
    // Guard against 3.0000000000000004 becoming 4.
    out.push_back(static_cast<std::size_t>(std::ceil(real - 1e-9)));
  }
  return out;
}

BlockScheduler::BlockScheduler(std::string name, std::vector<std::size_t> allocation,
                               std::size_t target, std::optional<std::size_t> coded_rows)
    : name_(std::move(name)),
      allocation_(std::move(allocation)),
      target_(target),
      coded_rows_(coded_rows) {
  const std::size_t total = std::accumulate(allocation_.begin(), allocation_.end(), std::size_t{0});
  if (target_ == 0) throw ConfigError("block scheduler needs a positive target");
  if (target_ > total) {
    throw ConfigError("block scheduler target " + std::to_string(target_) +
                      " exceeds the allocated " + std::to_string(total) + " packets");
  }
  if (coded_rows_ && *coded_rows_ > target_) {
    throw ConfigError("coded block target is below the row count");
  }
}

void BlockScheduler::on_start(Dispatcher& d) {
  if (allocation_.size() != d.helper_count()) {
    throw ContractViolation("allocation has " + std::to_string(allocation_.size()) +
                            " entries for " + std::to_string(d.helper_count()) + " helpers");
  }
  std::uint64_t tag = 0;
  for (HelperId n = 0; n < allocation_.size(); ++n) {
    for (std::size_t k = 0; k < allocation_[n]; ++k) d.send(n, tag++);
  }
}

bool BlockScheduler::on_result(Dispatcher& d, const ResultReport&) {
  if (++received_ >= target_) d.stop();
  return true;
}

std::optional<std::size_t> BlockScheduler::coding_overhead() const {
  if (!coded_rows_ || received_ < target_) return std::nullopt;
  return received_ - *coded_rows_;
}

BlockScheduler make_static_scheduler(std::span<const double> mean_betas, std::size_t rows) {
  StaticAllocation a = static_allocate(mean_betas, rows);
  return BlockScheduler("static", std::move(a.r), rows, rows);
}

BlockScheduler make_uncoded_scheduler(std::span<const double> mean_betas, std::size_t rows) {
  return BlockScheduler("uncoded", uncoded_allocate(mean_betas, rows), rows);
}

BlockScheduler make_hcmm_like_scheduler(std::span<const double> mean_betas, std::size_t rows,
                                        std::size_t overhead) {
  return BlockScheduler("hcmm_like", block_coded_allocate(mean_betas, rows + overhead),
                        rows + overhead, rows);
}

NonErgodicOracle::NonErgodicOracle(RuntimeTape& tape, PacketSizes sizes, CollectorConfig collector)
    : tape_(tape), sizes_(sizes), collector_(collector) {
  sizes_.validate();
}

void NonErgodicOracle::on_start(Dispatcher& d) {
  if (d.helper_count() != tape_.helper_count()) {
    throw ContractViolation("oracle tape and engine disagree on the helper count");
  }
  plans_.assign(d.helper_count(), Plan{});
  for (HelperId n = 0; n < plans_.size(); ++n) send_and_plan(d, n);
}

void NonErgodicOracle::send_and_plan(Dispatcher& d, HelperId n) {
  Plan& p = plans_[n];
  const Seconds now = d.now();
  const std::size_t index = d.send(n, collector_.next_tag());
  if (index != ++p.sent) throw StateError("oracle lost track of its packet indices");
  const Seconds arrival =
      std::max(p.last_arrival, now + tape_.uplink_delay(n, index, sizes_.data_bits));
  const Seconds start = std::max(arrival, p.last_end);
  p.last_tx = now;
  p.last_arrival = arrival;
  p.last_end = start + tape_.runtime(n, index);
  const Seconds up_next = tape_.uplink_delay(n, index + 1, sizes_.data_bits);
  d.wake_at(n, std::max(now, p.last_end - up_next));
}

void NonErgodicOracle::on_send_due(Dispatcher& d, HelperId n) { send_and_plan(d, n); }

bool NonErgodicOracle::on_result(Dispatcher& d, const ResultReport& result) {
  const bool useful = collector_.consume(result.tag);
  if (collector_.done()) d.stop();
  return useful;
}

RepetitionRoundRobin::RepetitionRoundRobin(CadenceParams params, std::size_t rows)
    : CadenceScheduler(params), live_(rows, true), live_count_(rows) {
  if (rows == 0) throw ConfigError("round robin needs R >= 1");
}

std::optional<std::uint64_t> RepetitionRoundRobin::next_tag(HelperId) {
  if (live_count_ == 0) return std::nullopt;
  while (!live_[cursor_]) cursor_ = (cursor_ + 1) % live_.size();
  const std::size_t tag = cursor_;
  cursor_ = (cursor_ + 1) % live_.size();
  return tag;
}

bool RepetitionRoundRobin::consume(const ResultReport& result) {
  if (result.tag >= live_.size()) throw StateError("round robin result for an unknown row");
  if (!live_[result.tag]) {
    ++duplicates_;
    return false;
  }
  live_[result.tag] = false;
  --live_count_;
  return true;
}

Seconds nonergodic_bruteforce(const std::vector<std::vector<double>>& betas,
                              std::span<const double> rtt, std::size_t total) {
  if (betas.empty() || betas.size() != rtt.size()) {
    throw ConfigError("brute force needs one RTT per helper");
  }
  std::vector<std::vector<double>> prefix(betas.size());
  for (std::size_t n = 0; n < betas.size(); ++n) {
    if (betas[n].size() < total) throw ConfigError("runtime list shorter than the total");
    prefix[n].assign(total + 1, 0.0);
    for (std::size_t i = 1; i <= total; ++i) prefix[n][i] = prefix[n][i - 1] + betas[n][i - 1];
  }
  Seconds best = kNever;
  std::function<void(std::size_t, std::size_t, Seconds)> rec = [&](std::size_t n,
                                                                  std::size_t left, Seconds cur) {
    if (cur >= best) return;
    if (n + 1 == betas.size()) {
      const Seconds t = left == 0 ? 0.0 : rtt[n] + prefix[n][left];
      best = std::min(best, std::max(cur, t));
      return;
    }
    for (std::size_t r = 0; r <= left; ++r) {
      const Seconds t = r == 0 ? 0.0 : rtt[n] + prefix[n][r];
      rec(n + 1, left - r, std::max(cur, t));
    }
  };
  rec(0, total, 0.0);
  return best;
}

}  // namespace c3sim
