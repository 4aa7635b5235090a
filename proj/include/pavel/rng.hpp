#pragma once

#include <cstdint>
#include <random>

#include "pavel/math.hpp"

namespace pavel {

// mt19937_64 with hand-rolled variate mappings. std::uniform_real_distribution
// is not guaranteed to produce the same stream across standard libraries, and
// seed outputs are part of the reproducibility contract.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1).
  double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), unbiased by rejection.
  uint64_t uniform_index(uint64_t n) {
    if (n <= 1) return 0;
    uint64_t limit = std::numeric_limits<uint64_t>::max() - std::numeric_limits<uint64_t>::max() % n;
    uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return v % n;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace pavel
