#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sgdlab/patterns.hpp"
#include "sgdlab/rng.hpp"

namespace sgdlab {

// ---------------------------------------------------------------------------
// Monte Carlo plumbing

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

// Number of sub-streams a Monte Carlo run is split into. Stream s draws from
// Rng(derive_seed(seed, s)) and handles samples/kMonteCarloStreams draws plus
// one extra when s < samples % kMonteCarloStreams. Partial results are merged
// in stream order, so the estimate does not depend on `jobs`.
inline constexpr std::size_t kMonteCarloStreams = 16;

// Estimates `width` means at once; `draw` writes one sample of each into its
// span argument. Requires samples >= 2.
std::vector<McEstimate> monte_carlo_means(
    std::size_t samples, std::uint64_t seed, std::size_t width,
    const std::function<void(Rng&, std::span<double>)>& draw, std::size_t jobs = 1);

McEstimate monte_carlo_mean(std::size_t samples, std::uint64_t seed,
                            const std::function<double(Rng&)>& draw, std::size_t jobs = 1);

// Uniformly random balanced pattern (n/2 ones).
SignPattern sample_balanced_pattern(std::size_t n, Rng& rng);

// ---------------------------------------------------------------------------
// beta = E[(sum_i s_i (1 - alpha)^i)^2], alpha = eta lambda_max, s_i = sign(i)
// of a uniformly random balanced pattern, i = 0..n-1.

// Exhaustive over balanced patterns. Requires even n <= kMaxEnumerationSize
// and 0 <= alpha <= 1; throws std::invalid_argument otherwise.
double beta_exact(std::size_t n, double eta, double lambda_max);

// Same expectation with exponent n-1-i; equal to beta_exact by exchangeability.
double beta_exact_reversed(std::size_t n, double eta, double lambda_max);

McEstimate beta_monte_carlo(std::size_t n, double eta, double lambda_max, std::size_t samples,
                            std::uint64_t seed);

// min{1 + 1/alpha, n^3 alpha^2} with no constant applied. Throws when
// alpha == 0.
double beta_lower_envelope(std::size_t n, double eta, double lambda_max);

// ---------------------------------------------------------------------------
// Keyup quantity sum_j beta_{perm[j]} prod_{i > j} (1 - alpha_{perm[i]}), with a
// 0-based permutation. Requires alpha in [0,1], beta in [-1,1], sum beta = 0 to
// 1e-12 and perm a permutation of 0..n-1.
double keyup_quantity(std::span<const double> alphas, std::span<const double> betas,
                      std::span<const std::size_t> perm);

// log^2(8n/delta) min{1/alpha_bar, n^3 alpha_bar^2}, no constant applied.
double keyup_envelope(std::size_t n, double alpha_bar, double delta = 0.05);

// Shapes of the two-regime bounds on E|X| and E[X^2] for the keyup quantity X.
//   n alpha_bar <= 1/2: E|X| <= 2 n alpha_bar (explicit),
//                       E[X^2] <= c2 log^2(8/(n alpha_bar)) n^3 alpha_bar^2
//   otherwise:          E|X| <= c1 log(sqrt(2 alpha_bar) 8 n^2) / sqrt(alpha_bar),
//                       E[X^2] <= c3 log^2(8 n^2 alpha_bar^2) / alpha_bar
struct RandomVariableEnvelope {
  bool small_regime = false;
  double abs_shape = 0.0;
  double square_shape = 0.0;
};

RandomVariableEnvelope random_variable_envelope(std::size_t n, double alpha_bar);

struct KeyupMoments {
  double mean_abs = 0.0;
  double mean_square = 0.0;
  double alpha_bar = 0.0;
};

// Exact moments over all n! permutations (n <= 9).
KeyupMoments keyup_moments_exhaustive(std::span<const double> alphas,
                                      std::span<const double> betas);

// Exact moments for two-valued data: `ones` items carry (alpha1, beta1), the
// rest (alpha0, beta0). Enumerates arrangements, n <= kMaxEnumerationSize.
KeyupMoments keyup_moments_two_valued(std::size_t n, std::size_t ones, double alpha1,
                                      double beta1, double alpha0, double beta0);

// ---------------------------------------------------------------------------
// Permutation moment E[(1 - 2 l_0) prod_{i=1..m} l_i] over balanced patterns.

// 1/2 C(n/2-1, m-1) / C(n-1, m). Requires even n >= 2 and 1 <= m <= n-1.
Rational perm_moment_formula(std::size_t m, std::size_t n);

// Same expectation by enumeration (n <= kMaxEnumerationSize).
Rational perm_moment_enumerated(std::size_t m, std::size_t n);

// Value of an inequality-type quantity together with the claimed bound.
// bound_applies is false outside the range where the inequality is claimed;
// holds is then true by convention.
struct LemmaCheck {
  double value = 0.0;
  double bound = 0.0;
  bool bound_applies = false;
  bool holds = true;
};

// E[sum_i (1 - 2 l_i) prod_{j > i} (1 - alpha l_j)] by enumeration, with the
// bound -alpha n / 8 claimed when alpha <= 1/n.
LemmaCheck sum_prod_expectation_exact(std::size_t n, double eta, double lambda_max);

// Same expectation from the alternating binomial series
//   sum_i 1/2 sum_m (-alpha)^m C(n-i-1, m) C(n/2-1, m-1) / C(n-1, m),
// evaluated in floating point for any even n.
double sum_prod_expectation_series(std::size_t n, double eta, double lambda_max);

// E[prod_i (1 - alpha l_i) * sum_i (1 - 2 l_i) prod_{j > i} (1 - alpha l_j)] by
// enumeration, bound -alpha n / 16. Throws PreconditionViolation when
// alpha > 1/n.
LemmaCheck stochastic_terms_exact(std::size_t n, double eta, double lambda_max);

// prod_i (1 - alpha l_i) = (1 - alpha)^{n/2} against 1 - alpha n / 2; holds
// also requires the bound to be >= 1/2. Throws PreconditionViolation when
// alpha > 1/n.
LemmaCheck deterministic_prod(std::size_t n, double eta, double lambda_max);

// Exact E[x_k] for x_{t+1} = prod_i (1 - alpha l_i) x_t
//   + (eta G / 2) sum_i (1 - 2 l_i) prod_{j > i} (1 - alpha l_j), x_0 = 0,
// against -(eta G / 8)(1 - (1 - alpha n / 2)^k). Any even n (series route
// past the enumeration cap). Throws PreconditionViolation when alpha > 1/n.
LemmaCheck xt_bound(std::size_t n, double eta, double lambda_max, double grad_bound,
                    std::size_t k);

// ---------------------------------------------------------------------------
// CSV export: quantity,n,eta_lambda_max,exact,mc_mean,mc_se. Missing Monte
// Carlo columns are left empty.

struct OracleRow {
  std::string quantity;
  std::size_t n = 0;
  double eta_lambda_max = 0.0;
  double exact = 0.0;
  bool has_mc = false;
  double mc_mean = 0.0;
  double mc_se = 0.0;
};

inline constexpr const char* kOracleCsvHeader = "quantity,n,eta_lambda_max,exact,mc_mean,mc_se";
std::string format_oracle_row(const OracleRow& row);

}  // namespace sgdlab
