#pragma once

#include <cstdint>

namespace domkl {

/// SplitMix64 finalizer; used to spread derived seeds before seeding mt19937_64.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Labeled sub-streams of a master seed. Each source of randomness in an
/// experiment draws from its own label so it can be frozen independently.
enum class SeedStream : std::uint64_t {
  graph = 1,
  features = 2,
  data = 3,
  noise = 4,
  truth = 5,
  schedule = 6,
};

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial,
                                    SeedStream stream) noexcept {
  return mix_seed(mix_seed(master ^ trial) + static_cast<std::uint64_t>(stream));
}

}  // namespace domkl
