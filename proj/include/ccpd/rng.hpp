#pragma once

#include <cstdint>

namespace ccpd {

/// Fixed, portable pseudo-random generator used everywhere determinism is
/// promised (synthesis, shuffles, weight init). The update equations are
/// pinned here so fixtures reproduce bit-for-bit across platforms and
/// languages:
///
/// SplitMix64 (seed expansion):
///   z  = (state += 0x9E3779B97F4A7C15)
///   z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
///   z ^= z >> 27;  z *= 0x94D049BB133111EB
///   return z ^ (z >> 31)
///
/// xoshiro256** (stream):
///   out = rotl(s1 * 5, 7) * 9
///   t = s1 << 17
///   s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t
///   s3 = rotl(s3, 45)
///
/// The four xoshiro words are filled from SplitMix64, so any 64-bit seed
/// (including 0) yields a well-mixed state.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  uint64_t state_;
};

class Rng {
 public:
  explicit Rng(uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  uint64_t next_u64() {
    const uint64_t out = rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return out;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Unbiased integer in [0, bound); bound must be nonzero.
  uint64_t next_below(uint64_t bound) {
    const uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const uint64_t x = next_u64();
      if (x >= threshold) return x % bound;
    }
  }

  /// Standard normal via Box-Muller. Always consumes exactly two uniforms;
  /// the second variate of the pair is discarded to keep the stream layout
  /// independent of call history.
  double gaussian();

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t s_[4];
};

}  // namespace ccpd
