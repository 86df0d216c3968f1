#pragma once

// Counter-based RNG: SplitMix64 with independent streams. A (seed, stream)
// pair fully determines the sequence on every platform, so parallel chains
// get disjoint reproducible streams and every output records its pair.

#include <cstdint>

namespace clusterdiag {

class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed, uint64_t stream = 0)
      : state_(mix(seed ^ mix(0x9E3779B97F4A7C15ULL * (stream + 1)))) {}

  uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // uniform in [0, 1) with 53 random bits
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, bound)
  uint64_t below(uint64_t bound) { return next() % bound; }

 private:
  static uint64_t mix(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }
  uint64_t state_;
};

}  // namespace clusterdiag
