#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "proxipair/core.hpp"

namespace proxipair {

/// splitmix64 finalizer; derives independent stream seeds from (seed, stream).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// mt19937_64 with hand-rolled conversions, so draws are identical across
/// standard library implementations (the <random> distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (one draw per call, the pair's sine half is dropped).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform direction on the unit sphere of R^dim.
  Vector direction(std::size_t dim) {
    Vector v(dim);
    double n = 0.0;
    while (n < 1e-12) {
      for (std::size_t i = 0; i < dim; ++i) v[i] = normal();
      n = euclidean_norm(v);
    }
    return (1.0 / n) * v;
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace proxipair
