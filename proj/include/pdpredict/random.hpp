#pragma once

// Deterministic random streams.
//
// Every random draw in the library comes from `Rng`, a SplitMix64 generator
// (64-bit state, Steele/Lea/Flood 2014 constants). Only integer arithmetic is
// used to produce raw words and the derived distributions below are written
// out explicitly, so a given seed yields the same stream on every platform
// and standard library. Streams are versioned by `kRngVersion`; any change to
// the output sequence must bump it.
//
// Sub-streams are derived from a parent seed plus a name (or an index) with
// `derive_seed`, so that independent consumers never share a stream:
//
//   root -> "split"          stratified partition
//   root -> "generator"      synthetic cohort
//   root -> "model/<name>"   per-classifier training
//   model seed -> index t    per-tree bootstrap stream in the forest

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string_view>
#include <utility>

namespace pdpredict {

inline constexpr std::string_view kRngVersion = "splitmix64-v1";

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// FNV-1a, 64 bit.
inline constexpr std::uint64_t hash_name(std::string_view name) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                           std::string_view name) noexcept {
  return splitmix64_mix(parent ^ splitmix64_mix(hash_name(name)));
}

inline constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                           std::uint64_t index) noexcept {
  return splitmix64_mix(parent + 0x9E3779B97F4A7C15ULL * (index + 1));
}

class Rng {
 public:
  explicit constexpr Rng(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next_u64() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return splitmix64_mix(state_);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
  }

  // Uniform integer in [0, bound), rejection sampling so there is no
  // modulo bias. bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % bound;
  }

  // Standard normal via Box-Muller; the second variate is discarded so the
  // stream position depends only on the number of calls.
  double normal() noexcept {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double sd) noexcept { return mean + sd * normal(); }

  // Fisher-Yates, from the back.
  template <typename T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace pdpredict
