#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

#include "sgdlab/errors.hpp"
#include "sgdlab/moments.hpp"
#include "sgdlab/oracles.hpp"
#include "sgdlab/patterns.hpp"

namespace sgdlab {
namespace {

// Values of a two-valued multiset: `ones` items carry (a1, b1), the rest
// (a0, b0). Type 1 is the pair of item 0.
struct TwoValued {
  double a1 = 0.0, b1 = 0.0;
  double a0 = 0.0, b0 = 0.0;
  std::size_t ones = 0;
};

std::optional<TwoValued> classify(std::span<const double> a, std::span<const double> b) {
  TwoValued tv{a[0], b[0], a[0], b[0], 0};
  bool have_zero_type = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == tv.a1 && b[i] == tv.b1) {
      ++tv.ones;
    } else if (!have_zero_type) {
      tv.a0 = a[i];
      tv.b0 = b[i];
      have_zero_type = true;
    } else if (a[i] != tv.a0 || b[i] != tv.b0) {
      return std::nullopt;
    }
  }
  return tv;
}

using Moments5 = std::array<double, 5>;  // E[P], E[P^2], E[Q], E[Q^2], E[PQ]

// Moments after prepending an item with factor r and linear term b to a
// uniformly arranged remainder with moments m.
Moments5 prepend(const Moments5& m, double r, double b) {
  return {r * m[0], r * r * m[1], b * m[0] + m[2], b * b * m[1] + 2.0 * b * m[4] + m[3],
          r * (b * m[1] + m[4])};
}

// M(s, u) = u/s T1(M(s-1, u-1)) + (s-u)/s T0(M(s-1, u)), M(0, 0) = (1, 1, 0, 0, 0):
// the first item of a uniform arrangement is a one with probability u/s and
// the remainder is again uniform.
Moments5 two_valued_program(const TwoValued& tv, std::size_t n, double eta) {
  const double r1 = 1.0 - eta * tv.a1;
  const double r0 = 1.0 - eta * tv.a0;
  std::vector<Moments5> prev(tv.ones + 1, Moments5{}), cur(tv.ones + 1);
  prev[0] = {1.0, 1.0, 0.0, 0.0, 0.0};
  for (std::size_t s = 1; s <= n; ++s) {
    const double sd = static_cast<double>(s);
    const std::size_t u_max = std::min(s, tv.ones);
    for (std::size_t u = 0; u <= u_max; ++u) {
      Moments5 m{};
      const double w1 = static_cast<double>(u) / sd;
      const double w0 = 1.0 - w1;
      if (u > 0) {
        const Moments5 t1 = prepend(prev[u - 1], r1, tv.b1);
        for (std::size_t c = 0; c < 5; ++c) m[c] += w1 * t1[c];
      }
      if (u < s) {
        const Moments5 t0 = prepend(prev[u], r0, tv.b0);
        for (std::size_t c = 0; c < 5; ++c) m[c] += w0 * t0[c];
      }
      cur[u] = m;
    }
    std::swap(prev, cur);
  }
  return prev[tv.ones];
}

Moments5 two_valued_enumeration(const TwoValued& tv, std::size_t n, double eta) {
  const Arrangements arrangements(n, tv.ones);
  const double r1 = 1.0 - eta * tv.a1;
  const double r0 = 1.0 - eta * tv.a0;
  Moments5 sum{};
  for (const SignPattern& pattern : arrangements) {
    double prod = 1.0;
    double q = 0.0;
    for (std::size_t j = n; j-- > 0;) {
      const bool one = pattern.labels[j] != 0;
      q += (one ? tv.b1 : tv.b0) * prod;
      prod *= one ? r1 : r0;
    }
    sum[0] += prod;
    sum[1] += prod * prod;
    sum[2] += q;
    sum[3] += q * q;
    sum[4] += prod * q;
  }
  const double count = static_cast<double>(arrangements.count());
  for (double& v : sum) v /= count;
  return sum;
}

PermutationMoments from_array(const Moments5& m) {
  PermutationMoments out;
  out.e_p = m[0];
  out.e_p2 = m[1];
  out.e_q = m[2];
  out.e_q2 = m[3];
  out.e_pq = m[4];
  return out;
}

}  // namespace

PermutationMoments permutation_moments(std::span<const double> curvatures,
                                       std::span<const double> linears, double eta,
                                       const MomentMethod& method) {
  const std::size_t n = curvatures.size();
  if (n == 0 || linears.size() != n) {
    throw std::invalid_argument("permutation moments: need equally long nonempty data");
  }
  if (!std::isfinite(eta)) throw std::invalid_argument("permutation moments: eta must be finite");

  if (method.kind == MomentMethod::Kind::kMonteCarlo) {
    const auto est = monte_carlo_means(
        method.samples, method.seed, 5,
        [&](Rng& rng, std::span<double> out) {
          const std::vector<std::size_t> perm = sample_permutation(n, rng);
          double prod = 1.0;
          double q = 0.0;
          for (std::size_t j = n; j-- > 0;) {
            q += linears[perm[j]] * prod;
            prod *= 1.0 - eta * curvatures[perm[j]];
          }
          out[0] = prod;
          out[1] = prod * prod;
          out[2] = q;
          out[3] = q * q;
          out[4] = prod * q;
        },
        method.jobs);
    PermutationMoments out = from_array({est[0].mean, est[1].mean, est[2].mean, est[3].mean, est[4].mean});
    out.standard_errors = {est[0].std_error, est[1].std_error, est[2].std_error, est[3].std_error,
                           est[4].std_error};
    return out;
  }

  const auto tv = classify(curvatures, linears);
  if (!tv) {
    throw UnsupportedInstance(
        "exact permutation moments need at most two distinct (curvature, linear) pairs; "
        "use the Monte Carlo method");
  }
  if (method.kind == MomentMethod::Kind::kEnumeration) {
    return from_array(two_valued_enumeration(*tv, n, eta));
  }
  return from_array(two_valued_program(*tv, n, eta));
}

}  // namespace sgdlab
