#include "sgdlab/patterns.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace sgdlab {
namespace {

__extension__ using Int128 = __int128;
__extension__ using UInt128 = unsigned __int128;

// Next larger integer with the same popcount (Gosper's hack).
std::uint64_t next_same_popcount(std::uint64_t v) {
  const std::uint64_t lowest = v & (~v + 1);
  const std::uint64_t ripple = v + lowest;
  return ripple | (((v ^ ripple) >> 2) / lowest);
}

Int128 checked(Int128 v) {
  constexpr Int128 kMax = std::numeric_limits<std::int64_t>::max();
  if (v > kMax || v < -kMax) throw std::overflow_error("Rational: 64-bit overflow");
  return v;
}

}  // namespace

std::size_t SignPattern::ones() const {
  return static_cast<std::size_t>(std::accumulate(labels.begin(), labels.end(), 0));
}

SignPattern Arrangements::iterator::operator*() const {
  SignPattern p;
  p.labels.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) p.labels[i] = static_cast<std::uint8_t>((mask_ >> i) & 1U);
  return p;
}

Arrangements::iterator& Arrangements::iterator::operator++() {
  if (mask_ == 0) {
    mask_ = limit_;  // the single empty arrangement
  } else {
    mask_ = next_same_popcount(mask_);
    if (mask_ >= limit_) mask_ = limit_;
  }
  return *this;
}

Arrangements::Arrangements(std::size_t n, std::size_t ones) : n_(n), ones_(ones) {
  if (n > kMaxEnumerationSize) {
    throw std::invalid_argument(
        fmt::format("enumeration supports n <= {}, got {}", kMaxEnumerationSize, n));
  }
  if (ones > n) throw std::invalid_argument("arrangements: more ones than positions");
  count_ = static_cast<std::size_t>(binomial(n, ones));
}

Arrangements::iterator Arrangements::begin() const {
  const std::uint64_t limit = std::uint64_t{1} << n_;
  return {(std::uint64_t{1} << ones_) - 1, limit, n_};
}

Arrangements::iterator Arrangements::end() const {
  const std::uint64_t limit = std::uint64_t{1} << n_;
  return {limit, limit, n_};
}

Arrangements enumerate_balanced_patterns(std::size_t n) {
  if (n == 0 || n % 2 != 0) {
    throw std::invalid_argument(fmt::format("balanced patterns need even n > 0, got {}", n));
  }
  return Arrangements(n, n / 2);
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  UInt128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // r * (n - k + i) / i is exact at every step.
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) {
      throw std::overflow_error(fmt::format("binomial({}, {}) overflows", n, k));
    }
  }
  return static_cast<std::uint64_t>(r);
}

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g == 0 ? 0 : num / g;
  den_ = g == 0 ? 1 : den / g;
}

Rational Rational::operator+(const Rational& o) const {
  const std::int64_t g = std::gcd(den_, o.den_);
  const Int128 num = checked(static_cast<Int128>(num_) * (o.den_ / g) +
                               static_cast<Int128>(o.num_) * (den_ / g));
  const Int128 den = checked(static_cast<Int128>(den_ / g) * o.den_);
  return {static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
}

Rational Rational::operator-(const Rational& o) const { return *this + Rational(-o.num_, o.den_); }

Rational Rational::operator*(const Rational& o) const {
  const std::int64_t g1 = std::gcd(num_, o.den_);
  const std::int64_t g2 = std::gcd(o.num_, den_);
  const std::int64_t a = g1 == 0 ? num_ : num_ / g1;
  const std::int64_t d2 = g1 == 0 ? o.den_ : o.den_ / g1;
  const std::int64_t c = g2 == 0 ? o.num_ : o.num_ / g2;
  const std::int64_t d1 = g2 == 0 ? den_ : den_ / g2;
  const Int128 num = checked(static_cast<Int128>(a) * c);
  const Int128 den = checked(static_cast<Int128>(d1) * d2);
  return {static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
}

Rational Rational::operator/(const Rational& o) const {
  if (o.num_ == 0) throw std::invalid_argument("Rational: division by zero");
  return *this * Rational(o.den_, o.num_);
}

}  // namespace sgdlab
