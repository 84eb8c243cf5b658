#include "sgdlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace sgdlab {
namespace {

void check_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(fmt::format("bounds: {} must be positive and finite, got {}", name, v));
  }
}

// G^2 / (lambda n k) after validating the shared arguments.
double base_rate(std::size_t n, std::size_t k, double grad_bound, double lambda) {
  if (n < 2) throw std::invalid_argument("bounds: n must be > 1");
  if (k == 0) throw std::invalid_argument("bounds: k must be >= 1");
  check_positive(grad_bound, "G");
  check_positive(lambda, "lambda");
  return grad_bound * grad_bound / (lambda * static_cast<double>(n) * static_cast<double>(k));
}

double ss_factor(std::size_t k, double kappa) {
  return std::min(1.0, kappa / static_cast<double>(k));
}

double rr_factor(std::size_t n, std::size_t k, double kappa) {
  const double kd = static_cast<double>(k);
  return std::min(1.0, kappa / (static_cast<double>(n) * kd) + kappa * kappa / (kd * kd));
}

double kappa_of(double lambda, double lambda_max) {
  check_positive(lambda_max, "lambda_max");
  return lambda_max / lambda;
}

}  // namespace

std::string_view to_string(TheoremId id) {
  switch (id) {
    case TheoremId::kSsLower: return "SS-LOWER";
    case TheoremId::kRrLower: return "RR-LOWER";
    case TheoremId::kSsUpper: return "SS-UPPER";
    case TheoremId::kRrUpper: return "RR-UPPER";
    case TheoremId::kWrBaseline: return "WR-BASELINE";
  }
  return "?";
}

TheoremId parse_theorem_id(std::string_view name) {
  for (const TheoremId id : kAllTheorems) {
    if (name == to_string(id)) return id;
  }
  throw std::invalid_argument(fmt::format("unknown theorem id '{}'", name));
}

double ss_lower(std::size_t n, std::size_t k, double grad_bound, double lambda, double lambda_max,
                double c) {
  check_positive(c, "c");
  const double base = base_rate(n, k, grad_bound, lambda);
  return c * base * ss_factor(k, kappa_of(lambda, lambda_max));
}

double rr_lower(std::size_t n, std::size_t k, double grad_bound, double lambda, double lambda_max,
                double c) {
  check_positive(c, "c");
  const double base = base_rate(n, k, grad_bound, lambda);
  return c * base * rr_factor(n, k, kappa_of(lambda, lambda_max));
}

double ss_upper(std::size_t n, std::size_t k, double grad_bound, double lambda, double lambda_max,
                double c_log) {
  return ss_lower(n, k, grad_bound, lambda, lambda_max, c_log);
}

double ss_upper_high_probability(std::size_t n, std::size_t k, double grad_bound, double lambda,
                                 double a_bar, double delta, double c) {
  check_positive(c, "c");
  check_positive(a_bar, "a_bar");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("bounds: delta must lie in (0, 1)");
  const double base = base_rate(n, k, grad_bound, lambda);
  const double nd = static_cast<double>(n);
  const double l1 = std::log(8.0 * nd / delta);
  const double l2 = std::log(nd * static_cast<double>(k));
  return c * l1 * l1 * l2 * l2 * base * ss_factor(k, a_bar / lambda);
}

double rr_upper(std::size_t n, std::size_t k, double grad_bound, double lambda, double lambda_max,
                double c_log) {
  return rr_lower(n, k, grad_bound, lambda, lambda_max, c_log);
}

double wr_baseline(std::size_t n, std::size_t k, double grad_bound, double lambda, double c) {
  check_positive(c, "c");
  return c * base_rate(n, k, grad_bound, lambda);
}

double crossover_epoch(double lambda, double lambda_max) {
  check_positive(lambda, "lambda");
  return kappa_of(lambda, lambda_max);
}

double rr_phase_transition_epoch(std::size_t n, double lambda, double lambda_max) {
  if (n < 2) throw std::invalid_argument("bounds: n must be > 1");
  return crossover_epoch(lambda, lambda_max) * static_cast<double>(n);
}

double evaluate(const BoundSpec& spec, const BoundInputs& in) {
  check_positive(spec.constant, "constant");
  check_positive(in.dimension_factor, "dimension_factor");
  double value = 0.0;
  switch (spec.theorem_id) {
    case TheoremId::kSsLower:
      value = ss_lower(in.n, in.k, in.grad_bound, in.lambda, in.lambda_max, spec.constant);
      break;
    case TheoremId::kRrLower:
      value = rr_lower(in.n, in.k, in.grad_bound, in.lambda, in.lambda_max, spec.constant);
      break;
    case TheoremId::kSsUpper:
      value = in.dimension_factor *
              ss_upper(in.n, in.k, in.grad_bound, in.lambda, in.lambda_max, spec.constant);
      break;
    case TheoremId::kRrUpper:
      value = in.dimension_factor *
              rr_upper(in.n, in.k, in.grad_bound, in.lambda, in.lambda_max, spec.constant);
      break;
    case TheoremId::kWrBaseline:
      value = wr_baseline(in.n, in.k, in.grad_bound, in.lambda, spec.constant);
      break;
  }
  if (spec.includes_logs) {
    const double l = std::log(static_cast<double>(in.n) * static_cast<double>(in.k));
    value *= l * l;
  }
  return value;
}

}  // namespace sgdlab
