#pragma once

#include <cstdint>

namespace semitorus {

// Counter-based stream: every value is a pure function of (seed, counter),
// so results do not depend on evaluation order or thread count.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t counter, std::uint64_t lane = 0) {
  return mix64(mix64(seed ^ mix64(lane)) + counter);
}

// Uniform in [0, 1) with 53 random bits.
inline double counter_uniform(std::uint64_t seed, std::uint64_t counter, std::uint64_t lane = 0) {
  return static_cast<double>(counter_hash(seed, counter, lane) >> 11) * 0x1.0p-53;
}

}  // namespace semitorus
