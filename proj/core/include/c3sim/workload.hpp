#pragma once

// Helper runtime and channel models, and the per-run "tape" of pre-drawn
// runtimes and link rates that lets several schedulers replay one realization.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "c3sim/rng.hpp"

namespace c3sim {

using Seconds = double;
using HelperId = std::size_t;

enum class Scenario {
  kPerPacketIid,    // fresh runtime per packet
  kFixedPerHelper,  // one runtime per helper for the whole run
};

std::string_view to_string(Scenario scenario);
Scenario parse_scenario(std::string_view text);

// beta = a + Exp(mu); F(t) = 1 - exp(-mu (t - a)) for t >= a.
struct ShiftedExponential {
  double shift = 0.0;
  double rate = 1.0;

  double mean() const { return shift + 1.0 / rate; }
  double sample(Rng& rng) const;
  double cdf(double t) const;
};

struct HelperProfile {
  HelperId id = 0;
  double shift = 0.0;  // a_n, seconds
  double rate = 1.0;   // mu_n, 1/seconds
  Scenario scenario = Scenario::kPerPacketIid;
  double channel_mean_mbps = 15.0;  // lambda_n
  std::optional<double> fixed_beta;
  // The helper stops acknowledging and computing from this time on.
  std::optional<Seconds> silent_after;

  void validate() const;
  ShiftedExponential distribution() const { return {shift, rate}; }
  double distribution_mean() const { return shift + 1.0 / rate; }
  // Mean runtime across packets: the fixed runtime in FixedPerHelper mode.
  double packet_mean() const;
};

// PerPacketIid draws every call; FixedPerHelper draws once and caches.
Seconds sample_runtime(HelperProfile& profile, Rng& rng);

struct PacketSizes {
  double data_bits = 8.0;
  double result_bits = 8.0;
  double ack_bits = 1.0;

  // B_x = bits_per_row * R.
  static PacketSizes for_rows(std::size_t rows, double bits_per_row = 8.0,
                              double result_bits = 8.0, double ack_bits = 1.0);
  void validate() const;
};

enum class ChannelKind { kZero, kDeterministic, kPoisson };

std::string_view to_string(ChannelKind kind);
ChannelKind parse_channel_kind(std::string_view text);

struct ChannelModel {
  ChannelKind kind = ChannelKind::kPoisson;
  double rate_floor_mbps = 0.1;

  void validate() const;
};

// Per-packet link rate in bits/s; infinite for the zero-delay channel.
double sample_rate_bps(const HelperProfile& profile, const ChannelModel& channel, Rng& rng);

Seconds sample_channel_delay(double bits, const HelperProfile& profile,
                             const ChannelModel& channel, Rng& rng);

// B_x / C_up + B_r / C_down
Seconds rtt_data_true(const PacketSizes& sizes, double up_bps, double down_bps);

enum class ShiftRule { kFixed, kInverseRate };

struct PopulationSpec {
  std::size_t helpers = 100;
  std::vector<double> rate_set{1.0, 2.0, 4.0};
  ShiftRule shift_rule = ShiftRule::kFixed;
  double shift_value = 0.5;
  Scenario scenario = Scenario::kPerPacketIid;
  double channel_min_mbps = 10.0;
  double channel_max_mbps = 20.0;

  void validate() const;
};

// mu_n uniform over rate_set, lambda_n uniform on the channel interval, and
// in FixedPerHelper mode the helper's single runtime, all from `seed`.
std::vector<HelperProfile> make_population(const PopulationSpec& spec, std::uint64_t seed);

// Lazily extended per-helper sequences of runtimes and link rates. Values are
// a function of (seed, helper, packet index) only, so every scheduler run on
// the same seed sees the same realization.
class RuntimeTape {
 public:
  RuntimeTape(std::vector<HelperProfile> helpers, ChannelModel channel, std::uint64_t seed);

  // Deterministic tape with explicit per-helper runtimes and a zero-delay
  // channel. Indices past the end repeat the last listed runtime.
  static RuntimeTape from_runtimes(const std::vector<std::vector<double>>& runtimes);

  std::size_t helper_count() const { return helpers_.size(); }
  const HelperProfile& profile(HelperId n) const { return helpers_.at(n); }
  std::span<const HelperProfile> profiles() const { return helpers_; }
  const ChannelModel& channel() const { return channel_; }
  std::uint64_t seed() const { return seed_; }

  // Packet indices are 1-based per helper.
  Seconds runtime(HelperId n, std::size_t index);
  Seconds uplink_delay(HelperId n, std::size_t index, double bits);
  Seconds ack_delay(HelperId n, std::size_t index, double bits);
  Seconds downlink_delay(HelperId n, std::size_t index, double bits);

  // Mean link rate used to predict RTT^data for a helper (bits/s).
  double mean_rate_bps(HelperId n) const;

 private:
  struct Lane {
    Rng runtime_rng;
    Rng channel_rng;
    std::vector<double> runtimes;
    std::vector<std::array<double, 3>> rates;  // up, ack, down in bits/s
    std::vector<double> scripted;             // explicit tapes only
  };

  RuntimeTape() = default;
  const std::array<double, 3>& rates(HelperId n, std::size_t index);

  std::vector<HelperProfile> helpers_;
  ChannelModel channel_;
  std::uint64_t seed_ = 0;
  std::vector<Lane> lanes_;
};

}  // namespace c3sim
