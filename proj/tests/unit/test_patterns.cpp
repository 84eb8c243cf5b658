#include <gtest/gtest.h>

#include <set>

#include "sgdlab/patterns.hpp"

namespace {

using sgdlab::Rational;

TEST(Patterns, TwoItems) {
  std::set<std::vector<std::uint8_t>> seen;
  for (const auto& p : sgdlab::enumerate_balanced_patterns(2)) seen.insert(p.labels);
  EXPECT_EQ(seen, (std::set<std::vector<std::uint8_t>>{{0, 1}, {1, 0}}));
}

TEST(Patterns, CountsMatchBinomial) {
  for (std::size_t n = 2; n <= 16; n += 2) {
    const auto all = sgdlab::enumerate_balanced_patterns(n);
    std::set<std::vector<std::uint8_t>> seen;
    for (const auto& p : all) {
      ASSERT_EQ(p.ones(), n / 2);
      seen.insert(p.labels);
    }
    EXPECT_EQ(seen.size(), sgdlab::binomial(n, n / 2));
    EXPECT_EQ(all.count(), seen.size());
  }
}

TEST(Patterns, WeightsSumToOne) {
  const auto all = sgdlab::enumerate_balanced_patterns(6);
  Rational total;
  for (auto it = all.begin(); it != all.end(); ++it) total += Rational(1, static_cast<std::int64_t>(all.count()));
  EXPECT_EQ(total, Rational(1));
}

TEST(Patterns, UnbalancedArrangements) {
  EXPECT_EQ(sgdlab::Arrangements(5, 2).count(), 10u);
  EXPECT_EQ(sgdlab::Arrangements(4, 0).count(), 1u);
  EXPECT_EQ(sgdlab::Arrangements(4, 4).count(), 1u);
}

TEST(Patterns, RejectsBadSizes) {
  EXPECT_THROW(sgdlab::enumerate_balanced_patterns(3), std::invalid_argument);
  EXPECT_THROW(sgdlab::enumerate_balanced_patterns(0), std::invalid_argument);
  EXPECT_THROW(sgdlab::enumerate_balanced_patterns(18), std::invalid_argument);
  EXPECT_THROW(sgdlab::Arrangements(4, 5), std::invalid_argument);
}

TEST(Patterns, SignReadings) {
  sgdlab::SignPattern p{{1, 0}};
  EXPECT_EQ(p.sign(0), 1);
  EXPECT_EQ(p.sign(1), -1);
  EXPECT_EQ(p.coefficient(0), -1);
  EXPECT_EQ(p.coefficient(1), 1);
}

TEST(Binomial, Values) {
  EXPECT_EQ(sgdlab::binomial(16, 8), 12870u);
  EXPECT_EQ(sgdlab::binomial(5, 7), 0u);
  EXPECT_EQ(sgdlab::binomial(60, 30), 118264581564861424ULL);
  EXPECT_THROW(sgdlab::binomial(200, 100), std::overflow_error);
}

TEST(RationalTest, Arithmetic) {
  EXPECT_EQ(Rational(2, 4), Rational(1, 2));
  EXPECT_EQ(Rational(1, -3), Rational(-1, 3));
  EXPECT_EQ(Rational(1, 2) + Rational(1, 3), Rational(5, 6));
  EXPECT_EQ(Rational(1, 2) - Rational(1, 3), Rational(1, 6));
  EXPECT_EQ(Rational(2, 3) * Rational(3, 4), Rational(1, 2));
  EXPECT_EQ(Rational(1, 2) / Rational(1, 4), Rational(2));
  EXPECT_DOUBLE_EQ(Rational(1, 6).value(), 1.0 / 6.0);
  EXPECT_THROW(Rational(1, 0), std::invalid_argument);
}

}  // namespace
