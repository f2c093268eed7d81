#pragma once

// Verifier battery. Each check compares a closed form or a small replay with an
// independent computation.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "c3sim/c3p.hpp"
#include "c3sim/theory.hpp"

namespace c3sim {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool all_passed() const;
  void write_text(std::ostream& out) const;
  void write_csv(std::ostream& out) const;
};

struct VerifyOptions {
  theory::ExpectedTuFn expected_tu = theory::expected_tu;
  std::size_t tu_triples = 20;
  std::size_t tu_samples = 1'000'000;
  double tu_tolerance = 1e-2;
  std::size_t prefix_samples = 10'000;
  std::size_t prefix_max_len = 20;
  std::size_t pr_max_i = 30;
  std::size_t pr_samples = 100'000;
  std::uint64_t seed = 20190611;
  bool include_examples = true;
};

struct ThreeRowReplay {
  double naive = 0.0;        // uncoded equal split (2,2,2), wait for all
  double coded_equal = 0.0;  // coded equal split (3,3,3), any 6 results
  double heterogeneity_aware = 0.0;  // static allocation (4,2,0)
  double oracle = 0.0;
  std::vector<std::size_t> static_split;
};

ThreeRowReplay replay_three_row();

struct IrregularTapeReplay {
  double rr = 0.0;
  double c3p = 0.0;
  std::size_t rr_duplicates = 0;
};

IrregularTapeReplay replay_irregular_tape(EstimatorMode estimator = EstimatorMode::kInferred);

// Each check on its own, so callers can run subsets.
CheckResult check_expected_tu_mc(const VerifyOptions& opts);
CheckResult check_expected_tu_continuity(const VerifyOptions& opts);
CheckResult check_efficiency_identity(const VerifyOptions& opts);
CheckResult check_idle_condition_equivalence(const VerifyOptions& opts);
std::vector<CheckResult> check_idle_probability_trend(const VerifyOptions& opts);
CheckResult check_prediction_consistency();
std::vector<CheckResult> check_examples();

VerifyReport run_verification(const VerifyOptions& opts = {});

}  // namespace c3sim
