#pragma once

#include <cstdint>
#include <random>

namespace evqr {

// Deterministic sampling across platforms: mt19937_64 is fully specified by
// the standard, but the standard distributions are not, so uniforms come from
// (x >> 11) * 2^-53 and normals from Box-Muller pairs in a fixed draw order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Standard normal; consumes two uniforms per pair, second value cached.
  double normal();

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace evqr
