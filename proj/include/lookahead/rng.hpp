#pragma once

#include <cstdint>
#include <random>

namespace lookahead {

// Seeded generator with platform-independent derived draws. Standard
// distribution objects are implementation-defined, so integer and real
// draws are derived from the raw engine output here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0);

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace lookahead
