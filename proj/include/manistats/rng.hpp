#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace manistats {

// SplitMix64 finalizer. Platform-independent, unlike the standard library
// distributions, so seeded runs are bit-identical everywhere.
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

// Combine a seed with stream keys into a derived stream seed. Used to key
// Monte Carlo tasks by (seed, n, replicate, ...) so any execution schedule
// produces identical draws.
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> keys) {
  std::uint64_t s = mix64(seed + 0x9e3779b97f4a7c15ull);
  for (std::uint64_t k : keys) {
    s = mix64(s ^ (k + 0x9e3779b97f4a7c15ull + (s << 6) + (s >> 2)));
  }
  return s;
}

// Counter-free SplitMix64 generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // burn two outputs so trivially related seeds decorrelate
    next_u64();
    next_u64();
  }

  static Rng stream(std::uint64_t seed,
                    std::initializer_list<std::uint64_t> keys) {
    return Rng(derive_seed(seed, keys));
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in (0, 1]
  double uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Box-Muller (no caching, one value per call)
  double normal() {
    double u1 = uniform_pos();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  // uniform integer in [0, bound), bound > 0
  std::uint64_t uniform_below(std::uint64_t bound) {
    std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace manistats
