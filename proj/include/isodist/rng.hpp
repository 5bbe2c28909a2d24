#pragma once

#include <cstdint>
#include <random>

namespace isodist {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent stream for item `index` (a tree, a seed repetition, ...) under
// a master seed. The result depends only on (seed, index).
inline Rng derive_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{
      static_cast<std::uint32_t>(splitmix64(seed)),
      static_cast<std::uint32_t>(splitmix64(seed) >> 32),
      static_cast<std::uint32_t>(splitmix64(splitmix64(seed) ^ index)),
      static_cast<std::uint32_t>(splitmix64(splitmix64(seed) ^ index) >> 32),
  };
  return Rng(seq);
}

// Uniform draw on the open interval (0, 1).
inline double uniform_open(Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = 0.0;
  do {
    u = unif(rng);
  } while (u <= 0.0 || u >= 1.0);
  return u;
}

}  // namespace isodist
