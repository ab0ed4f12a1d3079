#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace steer {

using Rng = std::mt19937_64;

// Independent substream derived from a run seed and a fixed label, so adding
// or reordering consumers never shifts another consumer's draws.
inline Rng make_stream(std::uint64_t seed, std::string_view label) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : label) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return Rng(seq);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace steer
