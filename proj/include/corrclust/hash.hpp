#pragma once

#include <cstdint>

namespace corrclust {

// splitmix64; used wherever a cheap stateless 64-bit mix is needed.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ mix64(b));
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix64(a ^ mix64(b ^ mix64(c)));
}

// Uniform double in [0,1) from the top 53 bits.
inline double to_unit(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// One coin per unordered vertex pair. Algorithms that must be coupled under a
// shared seed (the equivalence suites rely on this) all draw the pair's coin
// through here.
inline double pair_coin_u01(std::uint64_t seed, int u, int v) {
  const std::uint64_t lo = static_cast<std::uint64_t>(u < v ? u : v);
  const std::uint64_t hi = static_cast<std::uint64_t>(u < v ? v : u);
  return to_unit(mix64(seed, lo + 1, hi + 1));
}

}  // namespace corrclust
