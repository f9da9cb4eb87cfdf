#pragma once

#include <array>
#include <cstdint>

namespace bippr {

// Seedable deterministic pseudorandom stream (xoshiro256++ seeded via
// splitmix64). Every randomized operation in this library takes an Rng or a
// seed explicitly; there is no hidden global state. Streams for parallel or
// per-walk use are derived with derive(), which decorrelates child streams
// from the index they were forked at.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& s : state_) s = splitmix64(x);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Unbiased uniform integer in [0, bound). Lemire's method with rejection.
  std::uint32_t next_below(std::uint32_t bound) {
    std::uint64_t m = static_cast<std::uint64_t>(next_u32()) * bound;
    auto lo = static_cast<std::uint32_t>(m);
    if (lo < bound) {
      const std::uint32_t threshold = -bound % bound;
      while (lo < threshold) {
        m = static_cast<std::uint64_t>(next_u32()) * bound;
        lo = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

  // Child stream for index `stream`, independent of how many other streams
  // are derived from the same base. Identical (base, stream) always yields
  // the identical stream.
  static Rng derive(std::uint64_t base, std::uint64_t stream) {
    return Rng(base + 0x9E3779B97F4A7C15ULL * (stream + 1));
  }

  // Consumes one draw from this stream and returns an independent child.
  Rng split() { return Rng(next_u64()); }

 private:
  std::uint32_t next_u32() { return static_cast<std::uint32_t>(next_u64() >> 32); }

  static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::array<std::uint64_t, 4> state_;
};

}  // namespace bippr
