#pragma once
#include <array>
#include <cstdint>

namespace usdlo {

/// Counter-seeded substream RNG (xoshiro256++ state built from a splitmix64
/// mix of seed and substream id).
///
/// Contract: identical (seed, substream) pairs reproduce the same bit
/// stream on every platform; distinct substream ids give statistically
/// independent streams. Monte Carlo code assigns one substream per trial so
/// results do not depend on thread count or execution order.
class RandomStream {
public:
  RandomStream(std::uint64_t seed, std::uint64_t substream) {
    // splitmix64 over the combined key fills the xoshiro state.
    std::uint64_t x = seed ^ (substream * 0x9E3779B97F4A7C15ULL);
    for (auto &word : state_) {
      x += 0x9E3779B97F4A7C15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      word = z ^ (z >> 31);
    }
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

  /// Uniform double in [0, 1): top 53 bits of the next word.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in {0, 1}.
  int next_bit() { return static_cast<int>(next_u64() >> 63); }

private:
  static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
  std::array<std::uint64_t, 4> state_{};
};

} // namespace usdlo
