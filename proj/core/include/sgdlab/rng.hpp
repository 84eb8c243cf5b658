#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace sgdlab {

// Identifier recorded in every trajectory and sweep output. Changing any of the
// three pieces below (engine, bounded draw, shuffle order) must change it.
inline constexpr std::string_view kRngAlgorithmId =
    "mt19937_64/lemire-bounded/fisher-yates-desc";

// SplitMix64 finalizer (Steele, Lea & Flood). Used only for seed derivation.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Seed of sub-stream `stream` of `master`:
//   splitmix64(master + 0x9E3779B97F4A7C15 * (stream + 1)).
// Distinct streams of one master are statistically independent for our use.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

// Seedable 64-bit generator with a platform-independent output sequence.
// std::mt19937_64 is fully specified by the standard; the distributions in
// <random> are not, so bounded integers are drawn here with Lemire's
// multiply-and-reject method.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

// In-place Fisher-Yates: for i = size-1 down to 1 swap order[i] with
// order[uniform_below(i + 1)].
void shuffle(std::span<std::size_t> order, Rng& rng);

// Uniformly random permutation of {0, ..., n-1}; identity start then shuffle().
std::vector<std::size_t> sample_permutation(std::size_t n, Rng& rng);

}  // namespace sgdlab
