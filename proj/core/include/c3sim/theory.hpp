#pragma once

// Closed-form predictions and Monte-Carlo checks for the delay, idle time,
// queueing and efficiency results of the C3P analysis.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "c3sim/rng.hpp"

namespace c3sim::theory {

// sum_n 1 / E[beta_n]
double harmonic_rate(std::span<const double> mean_betas);

// (R + K) / sum 1/E[beta]
double predict_t_c3p(std::span<const double> mean_betas, std::size_t rows, std::size_t overhead);

// (R + K) / (E[beta_n] sum 1/E[beta])
std::vector<double> predict_r_c3p(std::span<const double> mean_betas, std::size_t rows,
                                  std::size_t overhead);

// Expected idle time per packet in the worst case (empty helper queue).
double expected_tu(double mu, double a, double rtt_data);

// Worst-case efficiency 1 - E[Tu] / (a + 1/mu), evaluated branch by branch.
double efficiency_theoretical(double mu, double a, double rtt_data);

using ExpectedTuFn = std::function<double(double mu, double a, double rtt)>;

// Monte-Carlo mean of min(max(a + 1/mu - beta, 0), rtt) over shifted
// exponential draws.
double expected_tu_mc(double mu, double a, double rtt_data, std::size_t samples,
                      std::uint64_t seed);

// Tq_1 = 0, Tq_{i+1} = max(beta_i - E + Tq_i, 0); returns Tq_1..Tq_{m+1}.
std::vector<double> tq_trace(std::span<const double> betas, double mean_beta);

// Tu_1 = 0, Tu_{i+1} = min(max(max(0, E - beta_i) - Tq_i, 0), rtt); returns
// Tu_1..Tu_{m+1}. Pass an infinite rtt for the uncapped model.
std::vector<double> tu_model(std::span<const double> betas, double mean_beta, double rtt_data);

// True iff sum_{j=i+1-k}^{i} beta_j < k E for every k = 1..i.
bool idle_prefix_condition(std::span<const double> betas, double mean_beta);

// Monte-Carlo Pr(Tu_{i+1} > 0) from idle_prefix_condition on i i.i.d. draws.
double pr_tu_positive_mc(std::size_t i, double mu, double a, std::size_t samples,
                         std::uint64_t seed);

}  // namespace c3sim::theory
