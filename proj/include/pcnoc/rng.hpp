#pragma once

#include <cstdint>

namespace pcnoc {

// xoshiro256** seeded through splitmix64. All randomness in the project goes
// through this generator: the standard library distributions are not
// reproducible across implementations, and runs must be bit-identical for a
// fixed seed.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t x = seed;
    for (auto& w : state_) w = splitmix64(x);
  }

  // Derives an independent stream for (seed, domain, index). Domains keep
  // unrelated consumers (traffic, selectors, optimizer) off each other's
  // streams even when they share the user-visible seed.
  static Rng stream(uint64_t seed, uint64_t domain, uint64_t index) {
    uint64_t x = seed;
    uint64_t a = splitmix64(x);
    x ^= domain * 0x9e3779b97f4a7c15ull;
    uint64_t b = splitmix64(x);
    x ^= index * 0xbf58476d1ce4e5b9ull;
    uint64_t c = splitmix64(x);
    return Rng(a ^ (b * 3) ^ (c * 7));
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53 bits of precision.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, bound), unbiased via masked rejection. bound >= 1.
  uint64_t next_below(uint64_t bound) {
    if (bound <= 1) return 0;
    uint64_t mask = bound - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    for (;;) {
      uint64_t v = next_u64() & mask;
      if (v < bound) return v;
    }
  }

  // Uniform integer in [lo, hi], inclusive.
  int next_int(int lo, int hi) {
    return lo + static_cast<int>(next_below(static_cast<uint64_t>(hi - lo + 1)));
  }

 private:
  static uint64_t splitmix64(uint64_t& x) {
    uint64_t z = (x += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t state_[4];
};

// Stream domains; keep these stable so seeds mean the same thing everywhere.
namespace rng_domain {
constexpr uint64_t traffic = 1;
constexpr uint64_t selector = 2;
constexpr uint64_t optimizer = 3;
constexpr uint64_t placement = 4;
}  // namespace rng_domain

}  // namespace pcnoc
