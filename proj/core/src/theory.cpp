#include "c3sim/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "c3sim/errors.hpp"

namespace c3sim::theory {

namespace {

void check_params(double mu, double a, double rtt) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ConfigError("mu must be positive");
  if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("shift a must be >= 0");
  if (!(rtt >= 0.0)) throw ConfigError("RTT must be >= 0");
}

}  // namespace

double harmonic_rate(std::span<const double> mean_betas) {
  if (mean_betas.empty()) throw ConfigError("need at least one helper");
  double sum = 0.0;
  for (double e : mean_betas) {
    if (!(e > 0.0) || !std::isfinite(e)) throw ConfigError("mean runtimes must be positive");
    sum += 1.0 / e;
  }
  return sum;
}

double predict_t_c3p(std::span<const double> mean_betas, std::size_t rows, std::size_t overhead) {
  return static_cast<double>(rows + overhead) / harmonic_rate(mean_betas);
}

std::vector<double> predict_r_c3p(std::span<const double> mean_betas, std::size_t rows,
                                  std::size_t overhead) {
  const double h = harmonic_rate(mean_betas);
  std::vector<double> r;
  r.reserve(mean_betas.size());
  for (double e : mean_betas) r.push_back(static_cast<double>(rows + overhead) / (e * h));
  return r;
}

double expected_tu(double mu, double a, double rtt_data) {
  check_params(mu, a, rtt_data);
  const double e = std::numbers::e;
  if (rtt_data < 1.0 / mu) return (1.0 / (e * mu)) * (1.0 - std::exp(mu * rtt_data)) + rtt_data;
  return 1.0 / (e * mu);
}

double efficiency_theoretical(double mu, double a, double rtt_data) {
  check_params(mu, a, rtt_data);
  const double e = std::numbers::e;
  const double am = 1.0 + a * mu;
  if (rtt_data < 1.0 / mu) {
    return (am - mu * rtt_data - 1.0 / e + std::exp(mu * rtt_data - 1.0)) / am;
  }
  return (e * am - 1.0) / (e * am);
}

double expected_tu_mc(double mu, double a, double rtt_data, std::size_t samples,
                      std::uint64_t seed) {
  check_params(mu, a, rtt_data);
  if (samples == 0) throw ConfigError("Monte-Carlo needs at least one sample");
  Rng rng = make_rng(seed, Stream::kTheory, 1);
  std::exponential_distribution<double> exp(mu);
  const double mean = a + 1.0 / mu;
  double sum = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double beta = a + exp(rng);
    sum += std::min(std::max(mean - beta, 0.0), rtt_data);
  }
  return sum / static_cast<double>(samples);
}

std::vector<double> tq_trace(std::span<const double> betas, double mean_beta) {
  std::vector<double> tq(betas.size() + 1, 0.0);
  for (std::size_t i = 0; i < betas.size(); ++i) {
    tq[i + 1] = std::max(betas[i] - mean_beta + tq[i], 0.0);
  }
  return tq;
}

std::vector<double> tu_model(std::span<const double> betas, double mean_beta, double rtt_data) {
  const std::vector<double> tq = tq_trace(betas, mean_beta);
  std::vector<double> tu(betas.size() + 1, 0.0);
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const double slack = std::max(std::max(0.0, mean_beta - betas[i]) - tq[i], 0.0);
    tu[i + 1] = std::min(slack, rtt_data);
  }
  return tu;
}

bool idle_prefix_condition(std::span<const double> betas, double mean_beta) {
  if (betas.empty()) throw ConfigError("idle prefix condition needs a nonempty prefix");
  double suffix = 0.0;
  for (std::size_t k = 1; k <= betas.size(); ++k) {
    suffix += betas[betas.size() - k];
    if (!(suffix < static_cast<double>(k) * mean_beta)) return false;
  }
  return true;
}

double pr_tu_positive_mc(std::size_t i, double mu, double a, std::size_t samples,
                         std::uint64_t seed) {
  check_params(mu, a, 0.0);
  if (i == 0) throw ConfigError("prefix length must be >= 1");
  if (samples == 0) throw ConfigError("Monte-Carlo needs at least one sample");
  Rng rng = make_rng(seed, Stream::kTheory, 2, i);
  std::exponential_distribution<double> exp(mu);
  const double mean = a + 1.0 / mu;
  std::vector<double> betas(i);
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    for (double& b : betas) b = a + exp(rng);
    if (idle_prefix_condition(betas, mean)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

}  // namespace c3sim::theory
