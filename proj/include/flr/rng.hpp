// SPDX-License-Identifier: Apache-2.0
//
// Deterministic randomness utilities. Every randomized routine in the
// library derives its state from a user-supplied 64-bit seed through the
// functions below, so results are reproducible run to run on a given build.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>

namespace flr {

// SplitMix64 finalizer (Steele, Lea & Flood). Seed mixing and cheap hashing.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// A master seed is split into independent sub-streams via
// substream_seed(master, tag); e.g. the predictor draws and the noise draws
// use distinct tags, so changing the noise level never perturbs the curves.
inline constexpr std::uint64_t kPredictorStreamTag = 0x7072656443757276ull;
inline constexpr std::uint64_t kNoiseStreamTag = 0x6E6F697365457073ull;

constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t tag) {
  return splitmix64(master ^ splitmix64(tag));
}

// Uniform integer in [0, bound) by rejection on the raw 64-bit stream.
// Unbiased, and unlike std::uniform_int_distribution the draw sequence is
// fixed by this definition rather than by the standard library vendor.
inline std::uint64_t bounded_uniform(std::mt19937_64& eng, std::uint64_t bound) {
  const std::uint64_t reject_below = (0 - bound) % bound;  // 2^64 mod bound
  for (;;) {
    const std::uint64_t x = eng();
    if (x >= reject_below) return x % bound;
  }
}

// Standard normal stream: mt19937_64 mapped through the Box-Muller
// transform. Each pair of variates consumes two engine words:
//   u1 = 1 - (w1 >> 11) * 2^-53 in (0,1],   u2 = (w2 >> 11) * 2^-53 in [0,1)
//   z0 = sqrt(-2 ln u1) cos(2 pi u2),  z1 = sqrt(-2 ln u1) sin(2 pi u2).
// next() returns z0 then the cached z1.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : eng_(splitmix64(seed)) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// FNV-1a over raw bytes; used for content identities (grids, curve sets).
inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 1469598103934665603ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace flr
