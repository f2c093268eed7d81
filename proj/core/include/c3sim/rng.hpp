#pragma once

#include <cstdint>
#include <random>

namespace c3sim {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to derive statistically independent stream seeds
/// from a base seed and a small set of integer coordinates.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                    std::uint64_t b = 0, std::uint64_t c = 0) {
  return mix64(mix64(mix64(mix64(base) ^ a) ^ b) ^ c);
}

// Stream tags keep independent consumers of one seed apart.
enum class Stream : std::uint64_t {
  kPopulation = 1,
  kRuntime = 2,
  kChannel = 3,
  kCoding = 4,
  kTheory = 5,
};

inline Rng make_rng(std::uint64_t base, Stream stream, std::uint64_t a = 0,
                    std::uint64_t b = 0) {
  return Rng(derive_seed(base, static_cast<std::uint64_t>(stream), a, b));
}

}  // namespace c3sim
