#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace ctbn {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of stream `index` under `master`. This is the single place the
/// derivation is defined; ensembles, EDNT estimation and the CLI all go
/// through it, so changing it changes every reproducible output.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(master + 0x9E3779B97F4A7C15ULL * (index + 1));
}

/// Random stream used by the samplers. Built on mt19937_64, whose output
/// sequence is fixed by the C++ standard; conversions to reals are done here
/// rather than through <random> distributions so results do not depend on
/// the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
  }

  /// Exponential with the given rate; +inf for rate 0.
  double exponential(double rate) {
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return -std::log(uniform_open()) / rate;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ctbn
