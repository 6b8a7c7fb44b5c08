#pragma once

// Seeded generator with a portable double mapping. The standard
// distributions are implementation-defined, so they are avoided wherever
// output has to be reproducible across toolchains.

#include <cstdint>
#include <random>

namespace dcsplit {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dcsplit
