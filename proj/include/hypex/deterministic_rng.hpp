#pragma once

// Seed-stable uniform sampling.  The draw path avoids
// std::uniform_real_distribution so that identical seeds give identical
// streams on every standard library.

#include <cstdint>
#include <random>

namespace hypex {

class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hypex
