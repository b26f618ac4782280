#pragma once

#include <cstdint>

namespace benchtopo {

/// SplitMix64 finalizer. Good avalanche, cheap, stateless.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derive a child seed from a parent seed and an index path,
/// e.g. derive_seed(master, beta_index, gamma_index, replicate).
template <typename... Ix>
constexpr std::uint64_t derive_seed(std::uint64_t seed, Ix... ix) noexcept {
  ((seed = mix64(seed ^ mix64(static_cast<std::uint64_t>(ix)))), ...);
  return seed;
}

/// Counter-based uniform stream keyed by a 64-bit seed. Each (step, draw)
/// pair addresses an independent value, so replaying any step of a
/// simulation reproduces its draws regardless of threading or call order.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) noexcept : key_(mix64(seed)) {}

  constexpr std::uint64_t bits(std::uint64_t step, std::uint64_t draw) const noexcept {
    return mix64(mix64(key_ ^ mix64(step)) + draw);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t step, std::uint64_t draw) const noexcept {
    return static_cast<double>(bits(step, draw) >> 11) * 0x1.0p-53;
  }

  constexpr std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
};

}  // namespace benchtopo
