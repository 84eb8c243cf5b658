#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <map>
#include <random>

#include "sgdlab/rng.hpp"

namespace {

using sgdlab::Rng;

TEST(Rng, RawStreamIsStandardMt19937_64) {
  // 10000th output of default-seeded mt19937_64, fixed by the C++ standard.
  Rng rng(5489);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.next();
  EXPECT_EQ(v, 9981545732273789042ULL);
}

TEST(Rng, SplitMixFrozenValues) {
  EXPECT_EQ(sgdlab::splitmix64(0), 0xE220A8397B1DCDAFULL);
  // Frozen from an independent Python transcription of the derivation rule.
  EXPECT_EQ(sgdlab::derive_seed(0, 0), 7960286522194355700ULL);
  EXPECT_EQ(sgdlab::derive_seed(7, 1), 16616101746815609346ULL);
  EXPECT_EQ(sgdlab::derive_seed(2024, 3), 15321458573535757178ULL);
}

TEST(Rng, DerivedStreamsDiffer) {
  EXPECT_NE(sgdlab::derive_seed(1, 0), sgdlab::derive_seed(1, 1));
  EXPECT_NE(sgdlab::derive_seed(1, 0), sgdlab::derive_seed(2, 0));
}

// Lemire's nearly-divisionless method on top of the standard engine.
std::uint64_t lemire(std::mt19937_64& e, std::uint64_t bound) {
  __extension__ using u128 = unsigned __int128;
  while (true) {
    const u128 m = static_cast<u128>(e()) * bound;
    const auto low = static_cast<std::uint64_t>(m);
    if (low >= (0 - bound) % bound) return static_cast<std::uint64_t>(m >> 64);
  }
}

TEST(Rng, UniformBelowMatchesReference) {
  for (const std::uint64_t bound : {1ULL, 2ULL, 3ULL, 7ULL, 100ULL, (1ULL << 63) + 5}) {
    Rng rng(42);
    std::mt19937_64 ref(42);
    for (int i = 0; i < 2000; ++i) ASSERT_EQ(rng.uniform_below(bound), lemire(ref, bound)) << bound;
  }
}

TEST(Rng, UniformBelowRejectsZero) {
  Rng rng(1);
  EXPECT_THROW(rng.uniform_below(0), std::invalid_argument);
}

TEST(Rng, Uniform01Range) {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, ShuffleFollowsDescendingFisherYates) {
  std::vector<std::size_t> v{0, 1, 2, 3, 4, 5};
  Rng rng(11);
  sgdlab::shuffle(v, rng);

  std::vector<std::size_t> w{0, 1, 2, 3, 4, 5};
  std::mt19937_64 ref(11);
  for (std::size_t i = w.size(); i > 1; --i) std::swap(w[i - 1], w[lemire(ref, i)]);
  EXPECT_EQ(v, w);
}

TEST(Rng, PermutationOfOneIsIdentity) {
  Rng rng(9);
  EXPECT_EQ(sgdlab::sample_permutation(1, rng), std::vector<std::size_t>{0});
}

TEST(Rng, PermutationsOfThreeAreUniform) {
  Rng rng(2024);
  std::map<std::vector<std::size_t>, int> counts;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) ++counts[sgdlab::sample_permutation(3, rng)];
  ASSERT_EQ(counts.size(), 6u);
  const double p = 1.0 / 6.0;
  const double sigma = std::sqrt(draws * p * (1 - p));
  for (const auto& [perm, c] : counts) EXPECT_LT(std::abs(c - draws * p), 4 * sigma);
}

TEST(Rng, SameSeedSameSequence) {
  Rng a(77), b(77);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(sgdlab::sample_permutation(10, a), sgdlab::sample_permutation(10, b));
}

}  // namespace
