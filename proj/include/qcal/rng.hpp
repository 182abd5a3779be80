#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace qcal {

/// Counter-based Gaussian stream: draw k depends only on (seed, k), so
/// noisy runs are reproducible bit for bit regardless of call order.
class CounterNormal {
 public:
  explicit CounterNormal(std::uint64_t seed) : seed_(seed) {}

  double operator()(std::uint64_t counter) const {
    // Box-Muller on two independent uniforms in (0, 1].
    const double u1 = uniform(2 * counter);
    const double u2 = uniform(2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double uniform(std::uint64_t counter) const {
    const std::uint64_t bits = mix(seed_ ^ mix(counter + 0x9e3779b97f4a7c15ULL));
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
  }

 private:
  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t seed_;
};

}  // namespace qcal
