#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "sgdlab/calibration.hpp"
#include "sgdlab/patterns.hpp"

namespace sgdlab {

// Invariant suites behind `sgdlab verify`.
//   lemmas       permutation-moment identity, sum-product and stochastic-term
//                inequalities, deterministic product, E[x_k] bound, series and
//                reversal consistency
//   closed-form  epoch-map evaluation against plain stepping on random instances
//   conjugation  rotated problems against rotated trajectories
//   envelopes    beta sandwich and keyup / two-regime envelope ratios against
//                the calibration table
enum class Suite { kLemmas, kClosedForm, kConjugation, kEnvelopes, kAll };

std::string_view to_string(Suite s);
Suite parse_suite(std::string_view name);

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double limit = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool all_passed() const;
  std::size_t failures() const;
  // One line per check: PASS|FAIL suite/name measured=... limit=... detail.
  std::string to_text() const;
};

// Replacement implementations, used to confirm that a suite notices a broken
// formula. Empty members mean the library function.
struct VerifyHooks {
  std::function<Rational(std::size_t m, std::size_t n)> perm_moment_formula;
};

struct VerifyOptions {
  // Envelope ratios are compared against this table when set; otherwise only
  // positivity and finiteness are checked.
  const CalibrationTable* calibration = nullptr;
  std::uint64_t seed = 2024;
  std::size_t closed_form_instances = 1000;
  std::size_t conjugation_rotations = 100;
  std::size_t jobs = 1;
  VerifyHooks hooks;
};

VerifyReport run_verify(Suite suite, const VerifyOptions& options = {});

}  // namespace sgdlab
