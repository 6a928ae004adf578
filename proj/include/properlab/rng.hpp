#pragma once

#include "properlab/rational.hpp"

#include <array>
#include <cstdint>
#include <span>

namespace properlab {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// xoshiro256** seeded through splitmix64. Fully specified here so that
// seeded runs are byte-reproducible across platforms and compilers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    for (auto& word : state_) word = splitmix64(seed);
  }

  std::uint64_t next() {
    auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Unbiased draw from [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = -bound % bound;
    for (;;) {
      std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::array<std::uint64_t, 4> state_;
};

// Independent stream for a (seed, index) pair; trial order never matters.
inline Rng derived_rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s = a ^ (stream * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull);
  splitmix64(s);
  return Rng(s);
}

// Draws an index with exact rational weights: category k is selected iff
// u/2^64 lands in [C_{k-1}, C_k). Integer comparisons only, no rounding.
inline int sample_categorical(Rng& rng, std::span<const Rat> weights) {
  const std::uint64_t u = rng.next();
  const Int u_int = u;
  Rat cum = 0;
  for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
    cum += weights[k];
    // u < cum * 2^64  <=>  u * den < num << 64
    Int lhs = u_int * denominator(cum);
    Int rhs = numerator(cum) << 64;
    if (lhs < rhs) return static_cast<int>(k);
  }
  return static_cast<int>(weights.size()) - 1;
}

}  // namespace properlab
