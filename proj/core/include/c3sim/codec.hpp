#pragma once

// LT (Fountain) coding of matrix rows for coded matrix-vector offloading.
//
// A coded packet is the unit-coefficient sum of a random subset of rows of A.
// Helpers return the inner product of that sum with x, which equals the sum of
// the corresponding components of y = A x, so the collector can recover y by
// peeling exactly as an LT decoder recovers source symbols.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <unordered_set>
#include <utility>
#include <vector>

#include "c3sim/errors.hpp"
#include "c3sim/rng.hpp"

namespace c3sim {

using SourceIndex = std::uint32_t;

template <class T>
concept CodecScalar = std::is_same_v<T, std::int64_t> || std::is_same_v<T, double>;

// y = A x task owned by the collector. Integer mode gives exact oracles,
// real mode mirrors the floating point products computed on helpers.
template <CodecScalar T>
struct SourceTask {
  std::vector<std::vector<T>> rows;
  std::vector<T> x;

  std::size_t row_count() const { return rows.size(); }
  std::size_t width() const { return x.size(); }

  void validate() const {
    if (rows.empty()) throw StructuralError("source task has no rows");
    if (x.empty()) throw StructuralError("source task has an empty x vector");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != x.size()) {
        throw StructuralError("row " + std::to_string(i) + " has width " +
                              std::to_string(rows[i].size()) + ", expected " +
                              std::to_string(x.size()));
      }
    }
  }

  // Direct product, used as the reference for decoded results.
  std::vector<T> multiply() const {
    validate();
    std::vector<T> y(rows.size(), T{});
    for (std::size_t i = 0; i < rows.size(); ++i) {
      T acc{};
      for (std::size_t j = 0; j < x.size(); ++j) acc += rows[i][j] * x[j];
      y[i] = acc;
    }
    return y;
  }
};

template <CodecScalar T>
struct SourcePacket {
  SourceIndex index = 0;
  std::span<const T> row;
};

// One packet per row, in row order.
template <CodecScalar T>
std::vector<SourcePacket<T>> packetize(const SourceTask<T>& task) {
  task.validate();
  std::vector<SourcePacket<T>> packets;
  packets.reserve(task.rows.size());
  for (std::size_t i = 0; i < task.rows.size(); ++i) {
    packets.push_back({static_cast<SourceIndex>(i), std::span<const T>(task.rows[i])});
  }
  return packets;
}

struct SolitonParams {
  double c = 0.1;
  double delta = 0.5;

  void validate() const;
};

// Robust soliton degree distribution over {1..R}.
class RobustSoliton {
 public:
  RobustSoliton(std::size_t source_count, SolitonParams params = {});

  std::size_t sample(Rng& rng) const;
  double pmf(std::size_t degree) const;
  std::size_t source_count() const { return source_count_; }
  // Degree at which the robust component places its spike.
  std::size_t spike() const { return spike_; }
  // Normalizer of rho + tau; roughly the expected reception overhead factor.
  double normalizer() const { return normalizer_; }

 private:
  std::size_t source_count_;
  std::size_t spike_;
  double normalizer_;
  std::vector<double> pmf_;  // index d-1
  std::vector<double> cdf_;
};

std::size_t sample_degree(Rng& rng, std::size_t source_count, const SolitonParams& params);

// The structural part of a coded packet: which rows were combined.
struct CodedSymbol {
  std::uint64_t coded_id = 0;
  std::vector<SourceIndex> sources;  // sorted, distinct

  std::size_t degree() const { return sources.size(); }
};

template <CodecScalar T>
struct CodedPacket {
  CodedSymbol symbol;
  std::vector<T> payload;
};

template <CodecScalar T>
struct ComputedResult {
  std::uint64_t coded_id = 0;
  T value{};
  std::size_t helper = 0;
  std::uint64_t helper_index = 0;
};

// Generates coded symbols with monotone ids. Degrees come from the robust
// soliton; sources are drawn uniformly without replacement.
class LtEncoder {
 public:
  LtEncoder(std::size_t source_count, SolitonParams params = {});

  CodedSymbol next(Rng& rng);
  CodedSymbol next_with_degree(Rng& rng, std::size_t degree);

  std::size_t source_count() const { return soliton_.source_count(); }
  std::uint64_t issued() const { return next_id_; }
  const RobustSoliton& distribution() const { return soliton_; }

 private:
  RobustSoliton soliton_;
  std::uint64_t next_id_ = 0;
  std::unordered_set<SourceIndex> scratch_;
};

template <CodecScalar T>
CodedPacket<T> encode(const CodedSymbol& symbol, const SourceTask<T>& task) {
  CodedPacket<T> packet{symbol, std::vector<T>(task.width(), T{})};
  for (SourceIndex s : symbol.sources) {
    if (s >= task.rows.size()) throw StructuralError("coded symbol names a row outside the task");
    const auto& row = task.rows[s];
    for (std::size_t j = 0; j < row.size(); ++j) packet.payload[j] += row[j];
  }
  return packet;
}

template <CodecScalar T>
CodedPacket<T> encode_next(LtEncoder& encoder, Rng& rng, const SourceTask<T>& task) {
  return encode(encoder.next(rng), task);
}

// Helper-side work: payload . x
template <CodecScalar T>
T compute_product(std::span<const T> payload, std::span<const T> x) {
  if (payload.size() != x.size()) {
    throw StructuralError("payload width " + std::to_string(payload.size()) +
                          " does not match x width " + std::to_string(x.size()));
  }
  T acc{};
  for (std::size_t j = 0; j < x.size(); ++j) acc += payload[j] * x[j];
  return acc;
}

template <CodecScalar T>
T compute_product(const CodedPacket<T>& packet, std::span<const T> x) {
  return compute_product(std::span<const T>(packet.payload), x);
}

// Peeling (belief propagation on the erasure channel) decoder for
// unit-coefficient sums. Each pending equation keeps the count and index sum
// of its unresolved sources, so the last unknown is known without scanning.
template <CodecScalar T>
class PeelingDecoder {
 public:
  explicit PeelingDecoder(std::size_t source_count)
      : values_(source_count, T{}), known_(source_count, false), incident_(source_count) {
    if (source_count == 0) throw ConfigError("decoder needs at least one source");
  }

  // Adds one computed result and returns the indices it (transitively)
  // recovered, in recovery order.
  std::vector<SourceIndex> add(std::span<const SourceIndex> sources, T value) {
    if (sources.empty()) throw StructuralError("coded equation has no sources");
    std::vector<SourceIndex> sorted(sources.begin(), sources.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw StructuralError("coded equation repeats a source");
    }
    if (sorted.back() >= values_.size()) {
      throw StructuralError("coded equation names an unknown source");
    }
    ++received_;
    std::vector<SourceIndex> recovered;

    Equation eq{value, 0, 0, true};
    std::vector<SourceIndex> unknown;
    for (SourceIndex s : sources) {
      if (known_[s]) {
        eq.value -= values_[s];
      } else {
        unknown.push_back(s);
      }
    }
    if (unknown.empty()) {
      check_redundant(eq.value);
    } else if (unknown.size() == 1) {
      resolve(unknown.front(), eq.value, recovered);
    } else {
      eq.remaining = static_cast<std::uint32_t>(unknown.size());
      for (SourceIndex s : unknown) eq.index_sum += s;
      const std::size_t id = equations_.size();
      equations_.push_back(eq);
      for (SourceIndex s : unknown) incident_[s].push_back(id);
    }
    if (complete() && completed_at_ == 0) completed_at_ = received_;
    return recovered;
  }

  std::vector<SourceIndex> add(const CodedSymbol& symbol, T value) {
    return add(std::span<const SourceIndex>(symbol.sources), value);
  }

  bool complete() const { return recovered_count_ == values_.size(); }
  std::size_t source_count() const { return values_.size(); }
  std::size_t recovered_count() const { return recovered_count_; }
  std::size_t received() const { return received_; }
  bool is_recovered(SourceIndex s) const { return known_.at(s); }

  // Results consumed beyond R when decoding completed.
  std::size_t overhead() const {
    if (!complete()) throw StateError("decoder has not completed");
    return completed_at_ - values_.size();
  }

  std::vector<T> decoded() const {
    if (!complete()) throw StateError("decoded_y requested before decoding completed");
    return values_;
  }

 private:
  struct Equation {
    T value;
    std::uint32_t remaining;
    std::uint64_t index_sum;
    bool live;
  };

  void check_redundant(T residual) const {
    if constexpr (std::is_integral_v<T>) {
      if (residual != 0) {
        throw InconsistencyError("redundant coded equation has nonzero residual " +
                                 std::to_string(residual));
      }
    }
  }

  void resolve(SourceIndex first, T first_value, std::vector<SourceIndex>& recovered) {
    std::vector<std::pair<SourceIndex, T>> work{{first, first_value}};
    while (!work.empty()) {
      auto [s, v] = work.back();
      work.pop_back();
      if (known_[s]) {
        check_redundant(v - values_[s]);
        continue;
      }
      known_[s] = true;
      values_[s] = v;
      ++recovered_count_;
      recovered.push_back(s);
      for (std::size_t id : incident_[s]) {
        Equation& eq = equations_[id];
        if (!eq.live) continue;
        eq.value -= v;
        eq.index_sum -= s;
        if (--eq.remaining == 1) {
          eq.live = false;
          work.emplace_back(static_cast<SourceIndex>(eq.index_sum), eq.value);
        }
      }
      incident_[s].clear();
      incident_[s].shrink_to_fit();
    }
  }

  std::vector<T> values_;
  std::vector<bool> known_;
  std::vector<std::vector<std::size_t>> incident_;
  std::vector<Equation> equations_;
  std::size_t recovered_count_ = 0;
  std::size_t received_ = 0;
  std::size_t completed_at_ = 0;
};

}  // namespace c3sim
