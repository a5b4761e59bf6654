#pragma once

#include <poldoa/types.hpp>

#include <cstdint>
#include <random>

namespace poldoa {

/// Portable seeded generator: std::mt19937_64 (fully specified by the
/// standard) feeding a hand-rolled uniform and Box-Muller normal, so draws are
/// bit-identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  /// Circular complex Gaussian with E|z|^2 = variance.
  cdouble complex_normal(double variance);

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// Seed of the substream for one Monte-Carlo trial.
inline std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial) { return base + trial; }

}  // namespace poldoa
