#pragma once

#include <cmath>
#include <cstdint>

#include "qtime/complex_matrix.hpp"

namespace qtime {

// Counter-based generator: every output is the SplitMix64 finalizer applied to
// seed/stream-derived base plus a 64-bit counter. Identical (seed, stream)
// reproduce the identical sequence bit-for-bit on any platform; distinct
// stream indices give statistically independent streams for ensemble workers.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : base_(mix(seed) ^ mix(~stream)), counter_(0) {}

  std::uint64_t next_u64() { return mix(base_ + counter_++ * 0x9E3779B97F4A7C15ull); }

  // Uniform in (0, 1].
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal pair via Box-Muller, returned as re + i*im.
  Complex next_complex_normal() {
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    return Complex(r * std::cos(theta), r * std::sin(theta));
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t base_;
  std::uint64_t counter_;
};

// Ginibre matrix: i.i.d. entries with standard normal real and imaginary
// parts, E|z|^2 = 2.
inline ComplexMatrix random_ginibre(RngStream& rng, int rows, int cols) {
  ComplexMatrix g(rows, cols);
  for (auto& z : g.entries()) z = rng.next_complex_normal();
  return g;
}

// Haar-random unit vector: normalized Ginibre column.
inline ComplexMatrix random_haar_vector(RngStream& rng, int d) {
  ComplexMatrix v = random_ginibre(rng, d, 1);
  double n = frob_norm(v);
  while (n == 0.0) {  // astronomically unlikely
    v = random_ginibre(rng, d, 1);
    n = frob_norm(v);
  }
  v *= Complex(1.0 / n);
  return v;
}

// Random Hermitian matrix (GUE-style, unnormalized).
inline ComplexMatrix random_hermitian(RngStream& rng, int d) {
  return hermitize(random_ginibre(rng, d, d));
}

}  // namespace qtime
