#pragma once

#include <cstdint>
#include <random>

namespace wildnet {

// mt19937_64 with hand-rolled uniform mappings. std::uniform_real_distribution
// is implementation-defined, so reports built from it would not be
// byte-identical across standard libraries; this is.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

  // [0, 1), 53-bit resolution
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  bool bernoulli(double p) { return uniform01() < p; }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace wildnet
