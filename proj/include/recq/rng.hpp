#pragma once

#include <cstdint>
#include <random>

#include "recq/special_functions.hpp"

namespace recq {

// SplitMix64 finalizer, used to decorrelate per-path substream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed for path j so its randomness is a pure function of (seed, j).
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t j) {
  return splitmix64(seed ^ splitmix64(j + 1));
}

// Caller-owned random stream: uniforms strictly inside (0,1) and standard
// normals via the inverse cdf, so draws are reproducible across platforms.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  double uniform() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return std_normal_quantile(uniform()); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace recq
