#pragma once

#include <cstdint>

namespace rlgan::envs {

// splitmix64 stepper; the 64-bit state lives inside the game state so that
// step() stays a pure function of (state, action).
inline std::uint64_t next_u64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform in [0, 1).
inline double uniform(std::uint64_t& s) {
  return static_cast<double>(next_u64(s) >> 11) * 0x1.0p-53;
}

}  // namespace rlgan::envs
