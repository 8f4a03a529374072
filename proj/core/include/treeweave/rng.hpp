#pragma once

#include <cassert>
#include <cstdint>
#include <random>

namespace treeweave {

/// All randomized operations draw from a shared mt19937_64 stream so a single
/// seed reproduces a whole run.
using Rng = std::mt19937_64;

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// splitmix64 finalizer; stateless mixing of a 64-bit value.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Per-run seed derivation: run i uses the (i+1)-th output of a splitmix64
/// generator seeded with the master seed. Runs are therefore individually
/// reproducible: seed_i = mix64(master + i * golden).
constexpr std::uint64_t run_seed(std::uint64_t master_seed, std::uint64_t run_index) {
  return mix64(master_seed + run_index * kGolden);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Unbiased uniform draw from [0, bound) by masked rejection. Avoids
/// std::uniform_int_distribution, whose output is implementation-defined.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  assert(bound > 0);
  std::uint64_t mask = bound - 1;
  mask |= mask >> 1;
  mask |= mask >> 2;
  mask |= mask >> 4;
  mask |= mask >> 8;
  mask |= mask >> 16;
  mask |= mask >> 32;
  for (;;) {
    const std::uint64_t r = rng() & mask;
    if (r < bound) return r;
  }
}

/// Fair coin.
inline bool coin_flip(Rng& rng) { return (rng() & 1ULL) != 0; }

/// Uniform double in [0, 1).
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace treeweave
