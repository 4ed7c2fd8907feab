#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace csma {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Deterministic RNG used by every randomized component. All draws go
// through next_u64() on a mt19937_64 engine; uniform01 and uniform_int
// avoid std distributions (whose output is implementation-defined), so
// a given seed yields byte-identical traces on any platform.
//
// stream(k) derives an independent sub-generator; derivation is pure in
// (seed, k), so sweeps can hand out per-run generators reproducibly.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  SeededRng stream(std::uint64_t substream) const {
    return SeededRng(splitmix64(seed_ ^ (0xD1B54A32D192ED03ULL * (substream + 1))));
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // 53-bit uniform in [0, 1)
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // unbiased integer in [0, bound), rejection sampling
  int uniform_int(int bound) {
    if (bound <= 0) throw std::invalid_argument("uniform_int: bound must be positive");
    const std::uint64_t b = static_cast<std::uint64_t>(bound);
    const std::uint64_t limit = (UINT64_MAX / b) * b;
    std::uint64_t r = next_u64();
    while (r >= limit) r = next_u64();
    return static_cast<int>(r % b);
  }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace csma
