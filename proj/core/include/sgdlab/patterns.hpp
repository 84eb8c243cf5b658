#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <vector>

namespace sgdlab {

// Largest n accepted by the exhaustive oracles; C(16, 8) = 12870 patterns.
inline constexpr std::size_t kMaxEnumerationSize = 16;

// Arrangement of zeros and ones, labels[i] is the label at position i (0-based).
// Two readings are used: sign(i) = 2 label - 1 in {-1, +1}, and
// coefficient(i) = 1 - 2 label in {+1, -1}.
struct SignPattern {
  std::vector<std::uint8_t> labels;

  std::size_t size() const { return labels.size(); }
  int sign(std::size_t i) const { return 2 * static_cast<int>(labels[i]) - 1; }
  int coefficient(std::size_t i) const { return 1 - 2 * static_cast<int>(labels[i]); }
  std::size_t ones() const;
};

// All arrangements of `ones` ones among n positions, in increasing order of the
// bitmask sum_i labels[i] 2^i. Under a uniform permutation of a two-valued
// multiset every arrangement has probability 1 / count().
class Arrangements {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = SignPattern;
    using difference_type = std::ptrdiff_t;
    using reference = SignPattern;
    using pointer = void;

    iterator() = default;
    iterator(std::uint64_t mask, std::uint64_t limit, std::size_t n)
        : mask_(mask), limit_(limit), n_(n) {}

    SignPattern operator*() const;
    std::uint64_t mask() const { return mask_; }
    iterator& operator++();
    iterator operator++(int) {
      iterator old = *this;
      ++*this;
      return old;
    }
    bool operator==(const iterator& other) const { return mask_ == other.mask_; }

   private:
    std::uint64_t mask_ = 0;
    std::uint64_t limit_ = 0;
    std::size_t n_ = 0;
  };

  // Throws std::invalid_argument when n > kMaxEnumerationSize or ones > n.
  Arrangements(std::size_t n, std::size_t ones);

  iterator begin() const;
  iterator end() const;
  std::size_t n() const { return n_; }
  std::size_t count() const { return count_; }

 private:
  std::size_t n_;
  std::size_t ones_;
  std::size_t count_;
};

// Balanced case ones = n/2. Throws std::invalid_argument for odd n, n == 0 or
// n > kMaxEnumerationSize.
Arrangements enumerate_balanced_patterns(std::size_t n);

// Exact C(n, k); 0 when k > n. Throws std::overflow_error past 2^64.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

// Reduced fraction with positive denominator.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  bool operator==(const Rational& o) const = default;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace sgdlab
