// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef HLSEP_RNG_HPP
#define HLSEP_RNG_HPP

#include <cstdint>
#include <random>

namespace hlsep {

// Deterministic uniform generator. std::uniform_real_distribution is not
// pinned down by the standard, so samples are derived from the raw engine
// output to keep results identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on (0, 1]; strictly positive so factor initialisation never
  // produces an absorbing zero.
  double uniform_pos() {
    const std::uint64_t bits = engine_() >> 11;  // top 53 bits
    return 1.0 - static_cast<double>(bits) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) {
    const std::uint64_t bits = engine_() >> 11;
    return lo + (hi - lo) * (static_cast<double>(bits) * 0x1.0p-53);
  }

  // Standard normal via Box-Muller on raw engine draws.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform_pos();
    double u2 = uniform(0.0, 1.0);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Derives an independent stream for sub-tasks (e.g. per-exemplar
  // activations) without disturbing the parent sequence.
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ULL * (index + 1));
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hlsep

#endif  // HLSEP_RNG_HPP
