#pragma once

#include <cstddef>
#include <string_view>

namespace sgdlab {

// Rate calculators. Every constant defaults to 1 and is shape-only: it is a
// knob for overlays and fits, not a value of any universal constant. Logs are
// natural. All functions throw std::invalid_argument on n < 2, k == 0 or a
// nonpositive real argument.

enum class TheoremId { kSsLower, kRrLower, kSsUpper, kRrUpper, kWrBaseline };

inline constexpr TheoremId kAllTheorems[] = {TheoremId::kSsLower, TheoremId::kRrLower,
                                             TheoremId::kSsUpper, TheoremId::kRrUpper,
                                             TheoremId::kWrBaseline};

// "SS-LOWER", "RR-LOWER", "SS-UPPER", "RR-UPPER", "WR-BASELINE".
std::string_view to_string(TheoremId id);
TheoremId parse_theorem_id(std::string_view name);

struct BoundSpec {
  TheoremId theorem_id = TheoremId::kWrBaseline;
  double constant = 1.0;       // must be > 0
  bool includes_logs = false;  // multiply by log^2(nk)
};

struct BoundInputs {
  std::size_t n = 2;
  std::size_t k = 1;
  double grad_bound = 1.0;
  double lambda = 1.0;
  double lambda_max = 1.0;
  // Upper bounds only: the hidden factor linear in d. No value is known.
  double dimension_factor = 1.0;
};

// constant * [log^2(nk)] * [dimension_factor for upper bounds] * shape.
double evaluate(const BoundSpec& spec, const BoundInputs& in);

// c G^2/(lambda n k) min{1, kappa/k}, kappa = lambda_max / lambda.
double ss_lower(std::size_t n, std::size_t k, double grad_bound, double lambda, double lambda_max,
                double c = 1.0);

// c G^2/(lambda n k) min{1, kappa/(n k) + kappa^2/k^2}.
double rr_lower(std::size_t n, std::size_t k, double grad_bound, double lambda, double lambda_max,
                double c = 1.0);

// ss_lower shape times c_log, which stands in for the hidden log and
// dimension factors.
double ss_upper(std::size_t n, std::size_t k, double grad_bound, double lambda, double lambda_max,
                double c_log = 1.0);

// c log^2(8n/delta) log^2(nk) G^2/(lambda n k) min{1, a_bar/(lambda k)}: the
// explicit per-coordinate high-probability form, a_bar the mean curvature.
double ss_upper_high_probability(std::size_t n, std::size_t k, double grad_bound, double lambda,
                                 double a_bar, double delta = 0.05, double c = 1.0);

double rr_upper(std::size_t n, std::size_t k, double grad_bound, double lambda, double lambda_max,
                double c_log = 1.0);

// c G^2/(lambda n k).
double wr_baseline(std::size_t n, std::size_t k, double grad_bound, double lambda, double c = 1.0);

// lambda_max / lambda: below this many epochs without-replacement sampling
// gives no improvement over with-replacement sampling.
double crossover_epoch(double lambda, double lambda_max);

// kappa n: past this k the kappa/(nk) term dominates the random reshuffling
// rate.
double rr_phase_transition_epoch(std::size_t n, double lambda, double lambda_max);

}  // namespace sgdlab
