#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace clab {

/// Deterministic random source. All draws go through explicit transforms of
/// the raw mt19937_64 stream, so results are bit-identical across platforms
/// and standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (no cached spare: keeps the draw count
  /// per call fixed, which matters for reproducible parallel splits).
  double normal() {
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  /// Geometric on {0,1,2,...} with P(k) = p(1-p)^k, via inversion.
  int geometric(double p) {
    double u = uniform();
    while (u == 0.0) u = uniform();  // guard log(0)
    return static_cast<int>(std::floor(std::log(u) / std::log1p(-p)));
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace clab
