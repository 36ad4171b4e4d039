#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace clutter {

// Seeded random source. The engine is mt19937_64, whose output sequence is
// fixed by the standard; the variate transforms below are implemented here
// rather than with <random> distributions so streams are identical across
// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream for replication `index` of a run seeded with `seed`.
  static Rng stream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Exponential with unit mean.
  double exponential();

  // Standard normal (Marsaglia polar method, one value cached).
  double normal();

  // Circular complex Gaussian with E|x|^2 = variance.
  std::complex<double> complex_normal(double variance);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace clutter
