#pragma once

#include <cstdint>
#include <random>

namespace ldlab {

// Deterministic stream splitting: one root seed, a component tag (claims count /
// severity / premium draw independent streams), and a chunk index for parallel
// substreams. Identical spec => identical engine state, on any worker layout.
struct SeedSpec {
  std::uint64_t root = 0;
  std::uint32_t component = 0;
  std::uint64_t chunk = 0;
};

namespace stream {
inline constexpr std::uint32_t count = 1;
inline constexpr std::uint32_t severity = 2;
inline constexpr std::uint32_t premium = 3;
}  // namespace stream

inline std::mt19937_64 make_engine(const SeedSpec& s) {
  std::seed_seq seq{static_cast<std::uint32_t>(s.root), static_cast<std::uint32_t>(s.root >> 32),
                    s.component, static_cast<std::uint32_t>(s.chunk),
                    static_cast<std::uint32_t>(s.chunk >> 32)};
  return std::mt19937_64(seq);
}

// Uniform on [0, 1) with 53 random bits; u=0 possible, u=1 never.
inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace ldlab
