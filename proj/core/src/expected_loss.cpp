#include <cmath>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

#include "sgdlab/engine.hpp"
#include "sgdlab/moments.hpp"
#include "sgdlab/oracles.hpp"
#include "sgdlab/rng.hpp"

namespace sgdlab {
namespace {

struct Column {
  std::vector<double> a;
  std::vector<double> b;
};

Column column(const Problem& p, Eigen::Index j) {
  Column c;
  c.a.reserve(p.size());
  c.b.reserve(p.size());
  for (const auto& comp : p.components()) {
    c.a.push_back(comp.curvatures(j));
    c.b.push_back(comp.linear(j));
  }
  return c;
}

Vector start(const Problem& p, double eta, const Vector& x0) {
  if (static_cast<std::size_t>(x0.size()) != p.dim()) {
    throw std::invalid_argument(
        fmt::format("expected loss: x0 has dimension {}, problem has {}", x0.size(), p.dim()));
  }
  if (!std::isfinite(eta) || eta < 0.0) {
    throw std::invalid_argument("expected loss: eta must be finite and nonnegative");
  }
  return p.to_diagonal_frame(x0);
}

// Coordinates get distinct Monte Carlo streams.
MomentMethod for_coordinate(MomentMethod method, Eigen::Index j) {
  if (method.kind == MomentMethod::Kind::kMonteCarlo) {
    method.seed = derive_seed(method.seed, static_cast<std::uint64_t>(j));
  }
  return method;
}

}  // namespace

double expected_loss(const Problem& p, const MomentState& state) {
  const Vector& a = p.mean_curvature();
  const Vector& b = p.mean_linear();
  double total = 0.0;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    total += 0.5 * a(j) * state.second(j) - b(j) * state.mean(j);
  }
  return total;
}

MomentState rr_moment_state(const Problem& p, double eta, std::size_t epochs, const Vector& x0,
                            const MomentMethod& method) {
  const Vector y0 = start(p, eta, x0);
  MomentState state{y0, y0.cwiseProduct(y0)};
  for (Eigen::Index j = 0; j < y0.size(); ++j) {
    const Column c = column(p, j);
    const PermutationMoments m = permutation_moments(c.a, c.b, eta, for_coordinate(method, j));
    double mean = state.mean(j);
    double second = state.second(j);
    for (std::size_t t = 0; t < epochs; ++t) {
      const double next_second = m.e_p2 * second + 2.0 * eta * m.e_pq * mean + eta * eta * m.e_q2;
      mean = m.e_p * mean + eta * m.e_q;
      second = next_second;
    }
    state.mean(j) = mean;
    state.second(j) = second;
  }
  return state;
}

double expected_loss_rr_analytic(const Problem& p, double eta, std::size_t epochs,
                                 const Vector& x0, const MomentMethod& method) {
  return expected_loss(p, rr_moment_state(p, eta, epochs, x0, method));
}

MomentState ss_moment_state(const Problem& p, double eta, std::size_t epochs, const Vector& x0,
                            const MomentMethod& method) {
  const Vector y0 = start(p, eta, x0);
  MomentState state{y0, y0.cwiseProduct(y0)};
  for (Eigen::Index j = 0; j < y0.size(); ++j) {
    const Column c = column(p, j);
    double s = 1.0;
    for (const double a : c.a) s *= 1.0 - eta * a;
    const PermutationMoments m = permutation_moments(c.a, c.b, eta, for_coordinate(method, j));
    const double sk = std::pow(s, static_cast<double>(epochs));
    const double g = eta * geometric_factor(s, epochs);
    state.mean(j) = sk * y0(j) + g * m.e_q;
    state.second(j) = sk * sk * y0(j) * y0(j) + 2.0 * sk * y0(j) * g * m.e_q + g * g * m.e_q2;
  }
  return state;
}

double expected_loss_ss_exact(const Problem& p, double eta, std::size_t epochs, const Vector& x0,
                              const MomentMethod& method) {
  return expected_loss(p, ss_moment_state(p, eta, epochs, x0, method));
}

MomentState wr_moment_state(const Problem& p, double eta, std::size_t epochs, const Vector& x0) {
  const Vector y0 = start(p, eta, x0);
  MomentState state{y0, y0.cwiseProduct(y0)};
  const double inv_n = 1.0 / static_cast<double>(p.size());
  for (Eigen::Index j = 0; j < y0.size(); ++j) {
    const Column c = column(p, j);
    double m1 = 0.0, m2 = 0.0, mab = 0.0, mb = 0.0, mb2 = 0.0;
    for (std::size_t i = 0; i < c.a.size(); ++i) {
      const double r = 1.0 - eta * c.a[i];
      m1 += r * inv_n;
      m2 += r * r * inv_n;
      mab += r * c.b[i] * inv_n;
      mb += c.b[i] * inv_n;
      mb2 += c.b[i] * c.b[i] * inv_n;
    }
    double mean = state.mean(j);
    double second = state.second(j);
    const std::size_t steps = p.size() * epochs;
    for (std::size_t t = 0; t < steps; ++t) {
      const double next_second = m2 * second + 2.0 * eta * mab * mean + eta * eta * mb2;
      mean = m1 * mean + eta * mb;
      second = next_second;
    }
    state.mean(j) = mean;
    state.second(j) = second;
  }
  return state;
}

double expected_loss_wr_analytic(const Problem& p, double eta, std::size_t epochs,
                                 const Vector& x0) {
  return expected_loss(p, wr_moment_state(p, eta, epochs, x0));
}

double beta_two_valued(std::size_t n, double eta, double lambda_max) {
  if (n == 0 || n % 2 != 0) throw std::invalid_argument(fmt::format("beta: need even n > 0, got {}", n));
  const double alpha = eta * lambda_max;
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument(fmt::format("beta: eta * lambda_max = {} outside [0, 1]", alpha));
  }
  std::vector<double> a(n, lambda_max), b(n, 1.0);
  for (std::size_t i = n / 2; i < n; ++i) b[i] = -1.0;
  return permutation_moments(a, b, eta).e_q2;
}

double ss_construction_expected_loss(std::size_t n, double grad_bound, double lambda,
                                     double lambda_max, double eta, std::size_t epochs,
                                     const Vector& x0) {
  if (x0.size() != 2) throw std::invalid_argument("ss construction formula: x0 must be 2-D");
  const double beta = n <= kMaxEnumerationSize ? beta_exact(n, eta, lambda_max)
                                               : beta_two_valued(n, eta, lambda_max);
  const double nk = static_cast<double>(n) * static_cast<double>(epochs);
  const double r = 1.0 - eta * lambda_max;
  const double g = geometric_factor(std::pow(r, static_cast<double>(n)), epochs);
  return 0.5 * lambda * std::pow(1.0 - eta * lambda, 2.0 * nk) * x0(0) * x0(0) +
         0.5 * lambda_max * std::pow(r, 2.0 * nk) * x0(1) * x0(1) +
         eta * eta * grad_bound * grad_bound * lambda_max / 8.0 * g * g * beta;
}

}  // namespace sgdlab
