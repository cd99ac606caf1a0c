#pragma once

// Counter-based random numbers.
//
// Every random quantity in the library is a pure function of a 64-bit seed
// and a small integer key. The mixing function is the SplitMix64 finalizer
// (Steele, Lea & Flood, "Fast splittable pseudorandom number generators",
// OOPSLA 2014). Keys are folded in one at a time, so a value keyed by
// (seed, stream, i, j) can be computed in any order and on any thread.

#include <cstdint>
#include <limits>

namespace sparseclust::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash(std::uint64_t seed, std::uint64_t key) noexcept {
  return mix64(seed + kGolden * (key + 1));
}

constexpr std::uint64_t hash(std::uint64_t seed, std::uint64_t k1,
                             std::uint64_t k2) noexcept {
  return hash(hash(seed, k1), k2);
}

constexpr std::uint64_t hash(std::uint64_t seed, std::uint64_t k1,
                             std::uint64_t k2, std::uint64_t k3) noexcept {
  return hash(hash(hash(seed, k1), k2), k3);
}

// Top 53 bits mapped to [0, 1).
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Sequential SplitMix64 stream. Satisfies UniformRandomBitGenerator, but
/// the helpers below are used instead of <random> distributions because the
/// standard distributions are implementation-defined and would break
/// cross-platform reproducibility.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    state_ += kGolden;
    return mix64(state_);
  }

  constexpr double uniform() noexcept { return to_unit((*this)()); }

  constexpr double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
  }

  // Uniform integer in [lo, hi], rejection sampled so there is no modulo bias.
  constexpr std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) noexcept {
    const std::uint64_t span = hi - lo;
    if (span == max()) return (*this)();
    const std::uint64_t range = span + 1;
    const std::uint64_t rem = (max() % range + 1) % range;  // 2^64 mod range
    std::uint64_t x = (*this)();
    while (rem != 0 && x > max() - rem) x = (*this)();
    return lo + x % range;
  }

 private:
  std::uint64_t state_;
};

}  // namespace sparseclust::rng
