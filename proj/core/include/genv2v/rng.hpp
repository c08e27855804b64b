#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace genv2v {

/// The single generator type used everywhere. Distributions are the standard
/// library's, so sequences are reproducible per platform/toolchain.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives a stream seed from a base seed and a list of tags. Distinct tag
/// lists give statistically independent streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = splitmix64(base);
  for (auto t : tags) h = splitmix64(h ^ splitmix64(t + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_rng(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
  return Rng(derive_seed(base, tags));
}

// Stream tags, kept in one place so no two consumers share a stream.
namespace stream {
inline constexpr std::uint64_t kShadowing = 1;
inline constexpr std::uint64_t kFading = 2;
inline constexpr std::uint64_t kExploration = 3;
inline constexpr std::uint64_t kReplay = 4;
inline constexpr std::uint64_t kNetworkInit = 5;
inline constexpr std::uint64_t kPolicy = 6;
}  // namespace stream

}  // namespace genv2v
