#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace fractint {

// Seeded generator with a fixed mapping from engine output to doubles, so
// samples do not depend on the standard library's distribution classes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();
  // Index drawn proportionally to the given nonnegative weights.
  std::size_t discrete(std::span<const double> cumulative);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace fractint
