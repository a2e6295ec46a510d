// Portable deterministic random source. std::uniform_real_distribution is
// implementation-defined, so reproducible draws go through this instead.

#pragma once

#include <cstdint>

namespace kflow {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::uint64_t state_;
};

/// Independent stream for (seed, index) pairs, e.g. one per ensemble run.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace kflow
