#pragma once

#include <cstdint>

namespace qkpc {

// splitmix64 step; the standard mixer for deriving independent seed streams.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for worker stream `index` derived from a master seed. Streams with
// different indices are decorrelated regardless of how close the indices are.
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t index) {
  std::uint64_t state = master_seed ^ (0x6a09e667f3bcc909ULL + index * 0x9e3779b97f4a7c15ULL);
  splitmix64_next(state);
  return splitmix64_next(state);
}

}  // namespace qkpc
