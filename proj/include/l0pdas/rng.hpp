#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace l0pdas {

/// The one random engine used throughout the library. Every generator takes
/// an explicit 64-bit seed; results are reproducible for a given standard
/// library implementation.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer; maps correlated seeds (base + i) to well-spread
/// engine seeds.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from `seed` and a stream label, so that
/// the operator, signal and noise of one trial never share a stream.
constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::string_view stream) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : stream) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return splitmix64(seed ^ splitmix64(h));
}

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

}  // namespace l0pdas
