#pragma once

#include <cstdint>
#include <random>

namespace sparsemt {

using Engine = std::mt19937_64;

/// Seed for the stream at `index` under `master`. SplitMix64 finalizer over
/// a keyed counter, so stream seeds depend only on (master, index).
constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) noexcept {
  auto mix = [](std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(master + 0x9e3779b97f4a7c15ULL) ^ (index * 0x9e3779b97f4a7c15ULL + 1));
}

}  // namespace sparsemt
