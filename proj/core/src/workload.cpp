#include "c3sim/workload.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "c3sim/errors.hpp"

namespace c3sim {

namespace {

constexpr double kBitsPerMegabit = 1e6;

}  // namespace

std::string_view to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::kPerPacketIid:
      return "iid";
    case Scenario::kFixedPerHelper:
      return "fixed";
  }
  return "unknown";
}

Scenario parse_scenario(std::string_view text) {
  if (text == "iid" || text == "scenario1" || text == "1") return Scenario::kPerPacketIid;
  if (text == "fixed" || text == "scenario2" || text == "2") return Scenario::kFixedPerHelper;
  throw ConfigError("unknown scenario '" + std::string(text) + "'");
}

std::string_view to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::kZero:
      return "zero";
    case ChannelKind::kDeterministic:
      return "deterministic";
    case ChannelKind::kPoisson:
      return "poisson";
  }
  return "unknown";
}

ChannelKind parse_channel_kind(std::string_view text) {
  if (text == "zero") return ChannelKind::kZero;
  if (text == "deterministic") return ChannelKind::kDeterministic;
  if (text == "poisson") return ChannelKind::kPoisson;
  throw ConfigError("unknown channel model '" + std::string(text) + "'");
}

double ShiftedExponential::sample(Rng& rng) const {
  std::exponential_distribution<double> exp(rate);
  return shift + exp(rng);
}

double ShiftedExponential::cdf(double t) const {
  if (t <= shift) return 0.0;
  return 1.0 - std::exp(-rate * (t - shift));
}

void HelperProfile::validate() const {
  if (!(shift >= 0.0) || !std::isfinite(shift)) throw ConfigError("helper shift a_n must be >= 0");
  if (!(rate > 0.0) || !std::isfinite(rate)) throw ConfigError("helper rate mu_n must be > 0");
  if (!(channel_mean_mbps > 0.0)) throw ConfigError("helper channel mean rate must be > 0");
  if (fixed_beta && !(*fixed_beta >= 0.0)) throw ConfigError("fixed runtime must be >= 0");
}

double HelperProfile::packet_mean() const {
  if (scenario == Scenario::kFixedPerHelper) {
    if (!fixed_beta) throw StateError("fixed runtime has not been drawn for this helper");
    return *fixed_beta;
  }
  return distribution_mean();
}

Seconds sample_runtime(HelperProfile& profile, Rng& rng) {
  if (profile.scenario == Scenario::kFixedPerHelper) {
    if (!profile.fixed_beta) profile.fixed_beta = profile.distribution().sample(rng);
    return *profile.fixed_beta;
  }
  return profile.distribution().sample(rng);
}

PacketSizes PacketSizes::for_rows(std::size_t rows, double bits_per_row, double result_bits,
                                  double ack_bits) {
  PacketSizes sizes{bits_per_row * static_cast<double>(rows), result_bits, ack_bits};
  sizes.validate();
  return sizes;
}

void PacketSizes::validate() const {
  if (!(data_bits > 0.0)) throw ConfigError("data packet size B_x must be positive");
  if (!(result_bits > 0.0)) throw ConfigError("result packet size B_r must be positive");
  if (!(ack_bits > 0.0)) throw ConfigError("ack packet size B_ack must be positive");
}

void ChannelModel::validate() const {
  if (!(rate_floor_mbps > 0.0)) throw ConfigError("channel rate floor must be positive");
}

double sample_rate_bps(const HelperProfile& profile, const ChannelModel& channel, Rng& rng) {
  switch (channel.kind) {
    case ChannelKind::kZero:
      return std::numeric_limits<double>::infinity();
    case ChannelKind::kDeterministic:
      return profile.channel_mean_mbps * kBitsPerMegabit;
    case ChannelKind::kPoisson: {
      std::poisson_distribution<long> poisson(profile.channel_mean_mbps);
      const double mbps = std::max(static_cast<double>(poisson(rng)), channel.rate_floor_mbps);
      return mbps * kBitsPerMegabit;
    }
  }
  throw ConfigError("unhandled channel model");
}

Seconds sample_channel_delay(double bits, const HelperProfile& profile,
                             const ChannelModel& channel, Rng& rng) {
  if (!(bits > 0.0)) throw ConfigError("channel delay requires a positive bit count");
  return bits / sample_rate_bps(profile, channel, rng);
}

Seconds rtt_data_true(const PacketSizes& sizes, double up_bps, double down_bps) {
  sizes.validate();
  if (!(up_bps > 0.0) || !(down_bps > 0.0)) throw ConfigError("link rates must be positive");
  return sizes.data_bits / up_bps + sizes.result_bits / down_bps;
}

void PopulationSpec::validate() const {
  if (helpers == 0) throw ConfigError("population needs at least one helper");
  if (rate_set.empty()) throw ConfigError("rate set must not be empty");
  for (double mu : rate_set) {
    if (!(mu > 0.0)) throw ConfigError("rates in the rate set must be positive");
  }
  if (shift_rule == ShiftRule::kFixed && !(shift_value >= 0.0)) {
    throw ConfigError("fixed shift must be >= 0");
  }
  if (!(channel_min_mbps > 0.0) || channel_max_mbps < channel_min_mbps) {
    throw ConfigError("channel interval must satisfy 0 < min <= max");
  }
}

std::vector<HelperProfile> make_population(const PopulationSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng = make_rng(seed, Stream::kPopulation);
  std::uniform_int_distribution<std::size_t> pick_rate(0, spec.rate_set.size() - 1);
  std::uniform_real_distribution<double> pick_channel(spec.channel_min_mbps, spec.channel_max_mbps);

  std::vector<HelperProfile> helpers(spec.helpers);
  for (std::size_t n = 0; n < spec.helpers; ++n) {
    HelperProfile& h = helpers[n];
    h.id = n;
    h.rate = spec.rate_set[pick_rate(rng)];
    h.shift = spec.shift_rule == ShiftRule::kFixed ? spec.shift_value : 1.0 / h.rate;
    h.scenario = spec.scenario;
    h.channel_mean_mbps = spec.channel_min_mbps == spec.channel_max_mbps
                              ? spec.channel_min_mbps
                              : pick_channel(rng);
    if (h.scenario == Scenario::kFixedPerHelper) sample_runtime(h, rng);
  }
  return helpers;
}

RuntimeTape::RuntimeTape(std::vector<HelperProfile> helpers, ChannelModel channel,
                         std::uint64_t seed)
    : helpers_(std::move(helpers)), channel_(channel), seed_(seed) {
  if (helpers_.empty()) throw ConfigError("runtime tape needs at least one helper");
  channel_.validate();
  lanes_.reserve(helpers_.size());
  for (HelperId n = 0; n < helpers_.size(); ++n) {
    helpers_[n].validate();
    lanes_.push_back(Lane{make_rng(seed, Stream::kRuntime, n), make_rng(seed, Stream::kChannel, n),
                          {}, {}, {}});
    if (helpers_[n].scenario == Scenario::kFixedPerHelper && !helpers_[n].fixed_beta) {
      sample_runtime(helpers_[n], lanes_[n].runtime_rng);
    }
  }
}

RuntimeTape RuntimeTape::from_runtimes(const std::vector<std::vector<double>>& runtimes) {
  if (runtimes.empty()) throw ConfigError("runtime tape needs at least one helper");
  RuntimeTape tape;
  tape.channel_.kind = ChannelKind::kZero;
  for (std::size_t n = 0; n < runtimes.size(); ++n) {
    if (runtimes[n].empty()) throw ConfigError("explicit runtime list is empty");
    for (double b : runtimes[n]) {
      if (!(b >= 0.0)) throw ConfigError("explicit runtimes must be >= 0");
    }
    HelperProfile h;
    h.id = n;
    h.rate = 1.0 / runtimes[n].front();
    h.shift = 0.0;
    tape.helpers_.push_back(h);
    tape.lanes_.push_back(Lane{Rng(0), Rng(0), {}, {}, runtimes[n]});
  }
  return tape;
}

Seconds RuntimeTape::runtime(HelperId n, std::size_t index) {
  if (index == 0) throw StateError("packet indices are 1-based");
  Lane& lane = lanes_.at(n);
  if (!lane.scripted.empty()) {
    return lane.scripted[std::min(index, lane.scripted.size()) - 1];
  }
  HelperProfile& h = helpers_[n];
  while (lane.runtimes.size() < index) lane.runtimes.push_back(sample_runtime(h, lane.runtime_rng));
  return lane.runtimes[index - 1];
}

const std::array<double, 3>& RuntimeTape::rates(HelperId n, std::size_t index) {
  if (index == 0) throw StateError("packet indices are 1-based");
  Lane& lane = lanes_.at(n);
  const HelperProfile& h = helpers_[n];
  while (lane.rates.size() < index) {
    std::array<double, 3> r{};
    for (double& v : r) v = sample_rate_bps(h, channel_, lane.channel_rng);
    lane.rates.push_back(r);
  }
  return lane.rates[index - 1];
}

Seconds RuntimeTape::uplink_delay(HelperId n, std::size_t index, double bits) {
  return bits / rates(n, index)[0];
}

Seconds RuntimeTape::ack_delay(HelperId n, std::size_t index, double bits) {
  return bits / rates(n, index)[1];
}

Seconds RuntimeTape::downlink_delay(HelperId n, std::size_t index, double bits) {
  return bits / rates(n, index)[2];
}

double RuntimeTape::mean_rate_bps(HelperId n) const {
  if (channel_.kind == ChannelKind::kZero) return std::numeric_limits<double>::infinity();
  return helpers_.at(n).channel_mean_mbps * kBitsPerMegabit;
}

}  // namespace c3sim
