#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tension {

/// Seed for an independent random stream derived from a master seed and a
/// purpose name. Adding a new consumer never shifts the draws of another.
inline std::uint64_t stream_seed(std::uint64_t master, std::string_view purpose) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : purpose) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = master ^ h;  // splitmix64 finalizer
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_stream(std::uint64_t master, std::string_view purpose) {
  return std::mt19937_64(stream_seed(master, purpose));
}

}  // namespace tension
