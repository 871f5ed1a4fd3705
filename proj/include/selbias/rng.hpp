#pragma once

#include <cstdint>

namespace selbias {

/// splitmix64 (Vigna's public-domain generator). Pinned here as the
/// sampling generator so datasets are reproducible per seed across
/// platforms and thread counts.
struct SplitMix64 {
  std::uint64_t state = 0;

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Decorrelated per-stream generator: stream k of a seed starts from a
/// fully mixed state, so streams can be consumed in any order (and in
/// parallel) without changing their contents.
inline SplitMix64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
  return SplitMix64{mix64(seed + 0x9E3779B97F4A7C15ULL) ^
                    mix64((stream + 1) * 0xD1B54A32D192ED03ULL)};
}

}  // namespace selbias
