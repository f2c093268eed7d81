#include "c3sim/codec.hpp"

#include <algorithm>
#include <cmath>

namespace c3sim {

void SolitonParams::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("soliton parameter c must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("soliton parameter delta must lie in (0, 1)");
}

RobustSoliton::RobustSoliton(std::size_t source_count, SolitonParams params)
    : source_count_(source_count), spike_(1), normalizer_(1.0) {
  if (source_count == 0) throw ConfigError("robust soliton needs at least one source");
  params.validate();

  const std::size_t k = source_count;
  pmf_.assign(k, 0.0);
  if (k == 1) {
    pmf_[0] = 1.0;
    cdf_ = {1.0};
    return;
  }

  const double kd = static_cast<double>(k);
  const double s = params.c * std::log(kd / params.delta) * std::sqrt(kd);
  const double pivot = std::floor(kd / s);
  spike_ = static_cast<std::size_t>(std::clamp(pivot, 1.0, kd));

  // Ideal soliton.
  pmf_[0] = 1.0 / kd;
  for (std::size_t d = 2; d <= k; ++d) {
    pmf_[d - 1] = 1.0 / (static_cast<double>(d) * static_cast<double>(d - 1));
  }
  // Robust addition.
  for (std::size_t d = 1; d < spike_; ++d) pmf_[d - 1] += s / (kd * static_cast<double>(d));
  pmf_[spike_ - 1] += std::max(0.0, s * std::log(s / params.delta) / kd);

  double total = 0.0;
  for (double p : pmf_) total += p;
  normalizer_ = total;
  cdf_.resize(k);
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    pmf_[i] /= total;
    acc += pmf_[i];
    cdf_[i] = acc;
  }
  cdf_.back() = 1.0;
}

std::size_t RobustSoliton::sample(Rng& rng) const {
  const double u = std::generate_canonical<double, 53>(rng);
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto idx = static_cast<std::size_t>(std::distance(cdf_.begin(), it));
  return std::min(idx, source_count_ - 1) + 1;
}

double RobustSoliton::pmf(std::size_t degree) const {
  if (degree == 0 || degree > source_count_) return 0.0;
  return pmf_[degree - 1];
}

std::size_t sample_degree(Rng& rng, std::size_t source_count, const SolitonParams& params) {
  return RobustSoliton(source_count, params).sample(rng);
}

LtEncoder::LtEncoder(std::size_t source_count, SolitonParams params)
    : soliton_(source_count, params) {}

CodedSymbol LtEncoder::next(Rng& rng) { return next_with_degree(rng, soliton_.sample(rng)); }

CodedSymbol LtEncoder::next_with_degree(Rng& rng, std::size_t degree) {
  const std::size_t k = soliton_.source_count();
  if (degree == 0 || degree > k) {
    throw ConfigError("coded degree " + std::to_string(degree) + " outside [1, " +
                      std::to_string(k) + "]");
  }
  CodedSymbol symbol;
  symbol.coded_id = next_id_++;
  symbol.sources.reserve(degree);

  // Floyd's sampling without replacement.
  scratch_.clear();
  for (std::size_t j = k - degree; j < k; ++j) {
    std::uniform_int_distribution<std::size_t> pick(0, j);
    const auto t = static_cast<SourceIndex>(pick(rng));
    if (scratch_.insert(t).second) {
      symbol.sources.push_back(t);
    } else {
      scratch_.insert(static_cast<SourceIndex>(j));
      symbol.sources.push_back(static_cast<SourceIndex>(j));
    }
  }
  std::sort(symbol.sources.begin(), symbol.sources.end());
  return symbol;
}

}  // namespace c3sim
