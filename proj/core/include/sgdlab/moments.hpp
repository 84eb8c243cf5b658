#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "sgdlab/model.hpp"

namespace sgdlab {

// Moments of one coordinate's epoch map under a uniformly random permutation:
//   P = prod_i (1 - eta a_{s(i)}),  Q = sum_j b_{s(j)} prod_{i > j} (1 - eta a_{s(i)}).
struct PermutationMoments {
  double e_p = 1.0;
  double e_p2 = 1.0;
  double e_q = 0.0;
  double e_q2 = 0.0;
  double e_pq = 0.0;
  // Monte Carlo only: standard errors in the order above.
  std::optional<std::array<double, 5>> standard_errors;
};

struct MomentMethod {
  enum class Kind {
    // Dynamic program over arrangements of a two-valued multiset; exact for
    // any n and any split of the two values.
    kExactTwoValued,
    // Exhaustive over arrangements of a two-valued multiset, n <= 16.
    kEnumeration,
    kMonteCarlo,
  };

  Kind kind = Kind::kExactTwoValued;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  static MomentMethod exact() { return {}; }
  static MomentMethod enumeration() { return {Kind::kEnumeration}; }
  static MomentMethod monte_carlo(std::size_t samples, std::uint64_t seed, std::size_t jobs = 1) {
    return {Kind::kMonteCarlo, samples, seed, jobs};
  }
};

// Throws UnsupportedInstance when an exact method meets more than two distinct
// (curvature, linear) pairs, std::invalid_argument on size mismatch or n == 0.
PermutationMoments permutation_moments(std::span<const double> curvatures,
                                       std::span<const double> linears, double eta,
                                       const MomentMethod& method = MomentMethod::exact());

// Per-coordinate E[y_t] and E[y_t^2] in the diagonal frame.
struct MomentState {
  Vector mean;
  Vector second;
};

// E[F] = sum_j (abar_j / 2 second_j - bbar_j mean_j).
double expected_loss(const Problem& p, const MomentState& state);

// Random reshuffling: the fresh permutation is independent of y_t, so
//   mean'   = e_p mean + eta e_q
//   second' = e_p2 second + 2 eta e_pq mean + eta^2 e_q2.
MomentState rr_moment_state(const Problem& p, double eta, std::size_t epochs, const Vector& x0,
                            const MomentMethod& method = MomentMethod::exact());
double expected_loss_rr_analytic(const Problem& p, double eta, std::size_t epochs,
                                 const Vector& x0,
                                 const MomentMethod& method = MomentMethod::exact());

// Single shuffling: y_k = S^k y_0 + eta g_k X with g_k = (1 - S^k)/(1 - S) and
// one shared permutation, so only E[X] and E[X^2] are needed.
MomentState ss_moment_state(const Problem& p, double eta, std::size_t epochs, const Vector& x0,
                            const MomentMethod& method = MomentMethod::exact());
double expected_loss_ss_exact(const Problem& p, double eta, std::size_t epochs, const Vector& x0,
                              const MomentMethod& method = MomentMethod::exact());

// With replacement: per-step recursion over n * epochs iid draws. Works for any
// data.
MomentState wr_moment_state(const Problem& p, double eta, std::size_t epochs, const Vector& x0);
double expected_loss_wr_analytic(const Problem& p, double eta, std::size_t epochs,
                                 const Vector& x0);

// E[(sum_i s_i (1 - alpha)^i)^2] for balanced +-1 signs, any even n, computed
// through the two-valued moment program.
double beta_two_valued(std::size_t n, double eta, double lambda_max);

// Closed form for the single shuffling construction:
//   lambda/2 (1 - eta lambda)^{2nk} x1^2 + lambda_max/2 (1 - eta lambda_max)^{2nk} x2^2
//   + eta^2 G^2 lambda_max / 8 ((1 - r^{nk}) / (1 - r^n))^2 beta,  r = 1 - eta lambda_max.
// beta comes from beta_exact for n <= 16 and from beta_two_valued above that.
double ss_construction_expected_loss(std::size_t n, double grad_bound, double lambda,
                                     double lambda_max, double eta, std::size_t epochs,
                                     const Vector& x0);

}  // namespace sgdlab
