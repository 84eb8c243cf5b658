#include "sgdlab/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "parallel.hpp"
#include "sgdlab/errors.hpp"

namespace sgdlab {
namespace {

// Slack for "alpha <= 1/n" when alpha comes from a rounded eta.
constexpr double kRangeSlack = 1e-12;

double checked_alpha(std::size_t n, double eta, double lambda_max) {
  if (n == 0 || n % 2 != 0) throw std::invalid_argument(fmt::format("need even n > 0, got {}", n));
  if (!std::isfinite(eta) || !std::isfinite(lambda_max) || eta < 0.0 || lambda_max < 0.0) {
    throw std::invalid_argument("eta and lambda_max must be finite and nonnegative");
  }
  const double alpha = eta * lambda_max;
  if (alpha > 1.0) {
    throw std::invalid_argument(fmt::format("eta * lambda_max = {} outside [0, 1]", alpha));
  }
  return alpha;
}

void check_enumerable(std::size_t n) {
  if (n > kMaxEnumerationSize) {
    throw std::invalid_argument(
        fmt::format("exhaustive oracle supports n <= {}, got {}", kMaxEnumerationSize, n));
  }
}

bool small_step(std::size_t n, double alpha) {
  return alpha * static_cast<double>(n) <= 1.0 + kRangeSlack;
}

void require_small_step(std::size_t n, double alpha, const char* what) {
  if (!small_step(n, alpha)) {
    throw PreconditionViolation(fmt::format(
        "{}: eta * lambda_max * n = {} > 1, where no inequality is claimed", what,
        alpha * static_cast<double>(n)));
  }
}

std::vector<double> powers(double r, std::size_t n) {
  std::vector<double> out(n, 1.0);
  for (std::size_t i = 1; i < n; ++i) out[i] = out[i - 1] * r;
  return out;
}

// sum_i coefficient(i) prod_{j > i} (1 - alpha l_j).
double signed_sum_prod(const SignPattern& p, double alpha) {
  double sum = 0.0;
  double prod = 1.0;
  for (std::size_t i = p.size(); i-- > 0;) {
    sum += p.coefficient(i) * prod;
    if (p.labels[i] != 0) prod *= 1.0 - alpha;
  }
  return sum;
}

double beta_by_exponent(std::size_t n, double eta, double lambda_max, bool reversed) {
  const double alpha = checked_alpha(n, eta, lambda_max);
  check_enumerable(n);
  const std::vector<double> pw = powers(1.0 - alpha, n);
  const Arrangements patterns = enumerate_balanced_patterns(n);
  double total = 0.0;
  for (const SignPattern& p : patterns) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += p.sign(i) * pw[reversed ? n - 1 - i : i];
    total += s * s;
  }
  return total / static_cast<double>(patterns.count());
}

void check_keyup_data(std::span<const double> alphas, std::span<const double> betas) {
  if (alphas.size() != betas.size() || alphas.empty()) {
    throw std::invalid_argument("keyup: alphas and betas must be nonempty and equally long");
  }
  double sum = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] >= 0.0 && alphas[i] <= 1.0)) throw std::invalid_argument("keyup: alpha outside [0, 1]");
    if (!(betas[i] >= -1.0 && betas[i] <= 1.0)) throw std::invalid_argument("keyup: beta outside [-1, 1]");
    sum += betas[i];
    scale += std::abs(betas[i]);
  }
  if (std::abs(sum) > 1e-12 * std::max(1.0, scale)) {
    throw std::invalid_argument(fmt::format("keyup: betas must sum to 0, got {}", sum));
  }
}

double keyup_unchecked(std::span<const double> alphas, std::span<const double> betas,
                       std::span<const std::size_t> perm) {
  double x = 0.0;
  double prod = 1.0;
  for (std::size_t j = perm.size(); j-- > 0;) {
    x += betas[perm[j]] * prod;
    prod *= 1.0 - alphas[perm[j]];
  }
  return x;
}

}  // namespace

std::vector<McEstimate> monte_carlo_means(
    std::size_t samples, std::uint64_t seed, std::size_t width,
    const std::function<void(Rng&, std::span<double>)>& draw, std::size_t jobs) {
  if (samples < 2) throw std::invalid_argument("Monte Carlo needs at least 2 samples");

  struct Partial {
    std::size_t count = 0;
    std::vector<double> mean, m2;
  };
  std::vector<Partial> partials(kMonteCarloStreams);
  detail::parallel_for(kMonteCarloStreams, jobs, [&](std::size_t s) {
    Partial& part = partials[s];
    part.count = samples / kMonteCarloStreams + (s < samples % kMonteCarloStreams ? 1 : 0);
    part.mean.assign(width, 0.0);
    part.m2.assign(width, 0.0);
    Rng rng(derive_seed(seed, s));
    std::vector<double> x(width);
    for (std::size_t t = 0; t < part.count; ++t) {
      draw(rng, x);
      const double inv = 1.0 / static_cast<double>(t + 1);
      for (std::size_t w = 0; w < width; ++w) {
        const double delta = x[w] - part.mean[w];
        part.mean[w] += delta * inv;
        part.m2[w] += delta * (x[w] - part.mean[w]);
      }
    }
  });

  // Chan et al. pairwise merge, in stream order.
  std::vector<double> mean(width, 0.0), m2(width, 0.0);
  double count = 0.0;
  for (const Partial& part : partials) {
    if (part.count == 0) continue;
    const double nb = static_cast<double>(part.count);
    const double total = count + nb;
    for (std::size_t w = 0; w < width; ++w) {
      const double delta = part.mean[w] - mean[w];
      mean[w] += delta * nb / total;
      m2[w] += part.m2[w] + delta * delta * count * nb / total;
    }
    count = total;
  }

  std::vector<McEstimate> out(width);
  for (std::size_t w = 0; w < width; ++w) {
    const double variance = m2[w] / (count - 1.0);
    out[w] = {mean[w], std::sqrt(variance / count), samples};
  }
  return out;
}

McEstimate monte_carlo_mean(std::size_t samples, std::uint64_t seed,
                            const std::function<double(Rng&)>& draw, std::size_t jobs) {
  return monte_carlo_means(
             samples, seed, 1, [&](Rng& rng, std::span<double> out) { out[0] = draw(rng); }, jobs)
      .front();
}

SignPattern sample_balanced_pattern(std::size_t n, Rng& rng) {
  const std::vector<std::size_t> perm = sample_permutation(n, rng);
  SignPattern p;
  p.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.labels[i] = perm[i] < n / 2 ? 1 : 0;
  return p;
}

double beta_exact(std::size_t n, double eta, double lambda_max) {
  return beta_by_exponent(n, eta, lambda_max, false);
}

double beta_exact_reversed(std::size_t n, double eta, double lambda_max) {
  return beta_by_exponent(n, eta, lambda_max, true);
}

McEstimate beta_monte_carlo(std::size_t n, double eta, double lambda_max, std::size_t samples,
                            std::uint64_t seed) {
  const double alpha = checked_alpha(n, eta, lambda_max);
  const std::vector<double> pw = powers(1.0 - alpha, n);
  return monte_carlo_mean(samples, seed, [&](Rng& rng) {
    const SignPattern p = sample_balanced_pattern(n, rng);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += p.sign(i) * pw[i];
    return s * s;
  });
}

double beta_lower_envelope(std::size_t n, double eta, double lambda_max) {
  const double alpha = checked_alpha(n, eta, lambda_max);
  if (alpha == 0.0) throw std::invalid_argument("beta envelope: eta * lambda_max must be positive");
  const double nd = static_cast<double>(n);
  return std::min(1.0 + 1.0 / alpha, nd * nd * nd * alpha * alpha);
}

double keyup_quantity(std::span<const double> alphas, std::span<const double> betas,
                      std::span<const std::size_t> perm) {
  check_keyup_data(alphas, betas);
  if (perm.size() != alphas.size()) throw std::invalid_argument("keyup: permutation length mismatch");
  std::vector<bool> seen(perm.size(), false);
  for (const std::size_t idx : perm) {
    if (idx >= perm.size() || seen[idx]) throw std::invalid_argument("keyup: not a permutation");
    seen[idx] = true;
  }
  return keyup_unchecked(alphas, betas, perm);
}

double keyup_envelope(std::size_t n, double alpha_bar, double delta) {
  if (n == 0) throw std::invalid_argument("keyup envelope: n must be positive");
  if (!(alpha_bar > 0.0)) throw std::invalid_argument("keyup envelope: alpha_bar must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("keyup envelope: delta outside (0, 1)");
  const double nd = static_cast<double>(n);
  const double log_term = std::log(8.0 * nd / delta);
  return log_term * log_term * std::min(1.0 / alpha_bar, nd * nd * nd * alpha_bar * alpha_bar);
}

RandomVariableEnvelope random_variable_envelope(std::size_t n, double alpha_bar) {
  if (n < 2) throw std::invalid_argument("random variable envelope: n must be >= 2");
  if (!(alpha_bar > 0.0 && alpha_bar <= 1.0)) {
    throw std::invalid_argument("random variable envelope: alpha_bar outside (0, 1]");
  }
  const double nd = static_cast<double>(n);
  RandomVariableEnvelope env;
  env.small_regime = nd * alpha_bar <= 0.5;
  if (env.small_regime) {
    const double l = std::log(8.0 / (nd * alpha_bar));
    env.abs_shape = 2.0 * nd * alpha_bar;
    env.square_shape = l * l * nd * nd * nd * alpha_bar * alpha_bar;
  } else {
    const double l1 = std::log(std::sqrt(2.0 * alpha_bar) * 8.0 * nd * nd);
    const double l3 = std::log(8.0 * nd * nd * alpha_bar * alpha_bar);
    env.abs_shape = l1 / std::sqrt(alpha_bar);
    env.square_shape = l3 * l3 / alpha_bar;
  }
  return env;
}

KeyupMoments keyup_moments_exhaustive(std::span<const double> alphas,
                                      std::span<const double> betas) {
  check_keyup_data(alphas, betas);
  const std::size_t n = alphas.size();
  if (n > 9) throw std::invalid_argument("keyup: exhaustive permutation oracle supports n <= 9");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double abs_sum = 0.0, sq_sum = 0.0, count = 0.0;
  do {
    const double x = keyup_unchecked(alphas, betas, perm);
    abs_sum += std::abs(x);
    sq_sum += x * x;
    count += 1.0;
  } while (std::next_permutation(perm.begin(), perm.end()));
  const double alpha_bar = std::accumulate(alphas.begin(), alphas.end(), 0.0) / static_cast<double>(n);
  return {abs_sum / count, sq_sum / count, alpha_bar};
}

KeyupMoments keyup_moments_two_valued(std::size_t n, std::size_t ones, double alpha1,
                                      double beta1, double alpha0, double beta0) {
  const Arrangements arrangements(n, ones);
  std::vector<double> alphas(n), betas(n);
  for (std::size_t i = 0; i < n; ++i) {
    alphas[i] = i < ones ? alpha1 : alpha0;
    betas[i] = i < ones ? beta1 : beta0;
  }
  check_keyup_data(alphas, betas);
  double abs_sum = 0.0, sq_sum = 0.0;
  for (const SignPattern& p : arrangements) {
    double x = 0.0;
    double prod = 1.0;
    for (std::size_t j = n; j-- > 0;) {
      const bool one = p.labels[j] != 0;
      x += (one ? beta1 : beta0) * prod;
      prod *= 1.0 - (one ? alpha1 : alpha0);
    }
    abs_sum += std::abs(x);
    sq_sum += x * x;
  }
  const double count = static_cast<double>(arrangements.count());
  const double alpha_bar = std::accumulate(alphas.begin(), alphas.end(), 0.0) / static_cast<double>(n);
  return {abs_sum / count, sq_sum / count, alpha_bar};
}

Rational perm_moment_formula(std::size_t m, std::size_t n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument(fmt::format("perm moment: need even n >= 2, got {}", n));
  if (m < 1 || m > n - 1) {
    throw std::invalid_argument(fmt::format("perm moment: m = {} outside [1, {}]", m, n - 1));
  }
  const std::uint64_t num = binomial(n / 2 - 1, m - 1);
  const std::uint64_t den = binomial(n - 1, m);
  constexpr auto kMax = static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max() / 2);
  if (num > kMax || den > kMax) throw std::overflow_error("perm moment: binomials exceed 62 bits");
  return Rational(static_cast<std::int64_t>(num), 2 * static_cast<std::int64_t>(den));
}

Rational perm_moment_enumerated(std::size_t m, std::size_t n) {
  if (m < 1 || m + 1 > n) throw std::invalid_argument("perm moment: m outside [1, n-1]");
  const Arrangements patterns = enumerate_balanced_patterns(n);
  std::int64_t total = 0;
  for (const SignPattern& p : patterns) {
    int prod = p.coefficient(0);
    for (std::size_t i = 1; i <= m; ++i) prod *= p.labels[i];
    total += prod;
  }
  return Rational(total, static_cast<std::int64_t>(patterns.count()));
}

LemmaCheck sum_prod_expectation_exact(std::size_t n, double eta, double lambda_max) {
  const double alpha = checked_alpha(n, eta, lambda_max);
  check_enumerable(n);
  const Arrangements patterns = enumerate_balanced_patterns(n);
  double total = 0.0;
  for (const SignPattern& p : patterns) total += signed_sum_prod(p, alpha);

  LemmaCheck out;
  out.value = total / static_cast<double>(patterns.count());
  out.bound = -alpha * static_cast<double>(n) / 8.0;
  out.bound_applies = small_step(n, alpha);
  out.holds = !out.bound_applies || out.value <= out.bound;
  return out;
}

double sum_prod_expectation_series(std::size_t n, double eta, double lambda_max) {
  const double alpha = checked_alpha(n, eta, lambda_max);
  const std::size_t h = n / 2;
  const double nd = static_cast<double>(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t after = n - i - 1;
    const std::size_t top = std::min(after, h);
    // term_m = (-alpha)^m C(after, m) C(h-1, m-1) / C(n-1, m), built by ratios.
    double term = 0.0;
    double inner = 0.0;
    for (std::size_t m = 1; m <= top; ++m) {
      const double md = static_cast<double>(m);
      if (m == 1) {
        term = -alpha * static_cast<double>(after) / (nd - 1.0);
      } else {
        term *= -alpha * (static_cast<double>(after) - md + 1.0) / (nd - md) *
                (static_cast<double>(h) - md + 1.0) / (md - 1.0);
      }
      inner += term;
    }
    total += 0.5 * inner;
  }
  return total;
}

LemmaCheck stochastic_terms_exact(std::size_t n, double eta, double lambda_max) {
  const double alpha = checked_alpha(n, eta, lambda_max);
  check_enumerable(n);
  require_small_step(n, alpha, "stochastic terms");
  const Arrangements patterns = enumerate_balanced_patterns(n);
  double total = 0.0;
  for (const SignPattern& p : patterns) {
    double prod = 1.0;
    for (const auto l : p.labels) {
      if (l != 0) prod *= 1.0 - alpha;
    }
    total += prod * signed_sum_prod(p, alpha);
  }
  LemmaCheck out;
  out.value = total / static_cast<double>(patterns.count());
  out.bound = -alpha * static_cast<double>(n) / 16.0;
  out.bound_applies = true;
  out.holds = out.value <= out.bound;
  return out;
}

LemmaCheck deterministic_prod(std::size_t n, double eta, double lambda_max) {
  const double alpha = checked_alpha(n, eta, lambda_max);
  require_small_step(n, alpha, "deterministic product");
  LemmaCheck out;
  out.value = std::pow(1.0 - alpha, static_cast<double>(n / 2));
  out.bound = 1.0 - alpha * static_cast<double>(n) / 2.0;
  out.bound_applies = true;
  out.holds = out.value >= out.bound && out.bound >= 0.5 - kRangeSlack;
  return out;
}

LemmaCheck xt_bound(std::size_t n, double eta, double lambda_max, double grad_bound,
                    std::size_t k) {
  const double alpha = checked_alpha(n, eta, lambda_max);
  require_small_step(n, alpha, "x_t bound");
  if (!(grad_bound >= 0.0)) throw std::invalid_argument("x_t bound: G must be nonnegative");
  const double e_p = std::pow(1.0 - alpha, static_cast<double>(n / 2));
  const double e_sum = n <= kMaxEnumerationSize ? sum_prod_expectation_exact(n, eta, lambda_max).value
                                                : sum_prod_expectation_series(n, eta, lambda_max);
  double mean = 0.0;
  for (std::size_t t = 0; t < k; ++t) mean = e_p * mean + 0.5 * eta * grad_bound * e_sum;

  LemmaCheck out;
  out.value = mean;
  out.bound = -(eta * grad_bound / 8.0) *
              (1.0 - std::pow(1.0 - alpha * static_cast<double>(n) / 2.0, static_cast<double>(k)));
  out.bound_applies = true;
  out.holds = out.value <= out.bound + kRangeSlack * std::abs(out.bound);
  return out;
}

std::string format_oracle_row(const OracleRow& row) {
  if (!row.has_mc) {
    return fmt::format("{},{},{:.17g},{:.17g},,", row.quantity, row.n, row.eta_lambda_max, row.exact);
  }
  return fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g}", row.quantity, row.n,
                     row.eta_lambda_max, row.exact, row.mc_mean, row.mc_se);
}

}  // namespace sgdlab
