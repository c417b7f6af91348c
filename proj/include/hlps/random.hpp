#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "hlps/geometry.hpp"

namespace hlps {

// The engine's output sequence is fixed by the standard. Distributions are
// derived here by hand because std:: distributions are implementation
// defined, and reports must be reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Index in [0, n). Slight modulo bias is irrelevant for n << 2^64.
  std::uint64_t index(std::uint64_t n) { return engine_() % n; }

  /// Uniform point in the disk of the given radius around the origin.
  Point2D in_disk(double radius) {
    const double r = radius * std::sqrt(uniform());
    const double theta = 2.0 * std::numbers::pi * uniform();
    return {r * std::cos(theta), r * std::sin(theta)};
  }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finaliser; used to derive independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace hlps
