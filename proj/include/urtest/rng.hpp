#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace urtest {

// SplitMix64 finalizer (Steele/Lea/Flood). Bijective on 64-bit words with
// strong avalanche, which is what we need to key independent substreams.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives one substream seed from a root seed and a path of components
// (domain tag, cell ids, replicate index, ...). Every simulation unit in this
// library draws from its own generator seeded this way, so results do not
// depend on execution order or on how work is split across threads.
inline std::uint64_t substream_seed(std::uint64_t root,
                                    std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(root);
  for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p));
  return h;
}

inline std::mt19937_64 make_rng(std::uint64_t root,
                                std::initializer_list<std::uint64_t> path = {}) {
  return std::mt19937_64(substream_seed(root, path));
}

// Domain tags keeping unrelated draw streams apart.
namespace stream {
inline constexpr std::uint64_t series = 0x53455249;     // DGP sample paths
inline constexpr std::uint64_t test = 0x54455354;       // per-test bootstrap roots
inline constexpr std::uint64_t replicate = 0x5245504c;  // bootstrap replicates
inline constexpr std::uint64_t critval = 0x43524954;    // DF critical-value paths
}  // namespace stream

}  // namespace urtest
