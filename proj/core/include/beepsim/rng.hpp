#pragma once

#include <cstdint>
#include <random>

namespace beepsim {

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// index-th output of the SplitMix64 stream seeded with `master`.
// Used everywhere a per-trial or per-worker seed is derived from a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master + (index + 1) * 0x9e3779b97f4a7c15ull);
}

// Seeded 64-bit generator. mt19937_64 has period 2^19937-1 and its output
// sequence is pinned by the standard, so traces are stable across platforms
// for a given stdlib-independent draw scheme (we only use raw 64-bit outputs).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double u01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), n >= 1. Multiply-shift; bias < 2^-64.
  std::uint32_t below(std::uint32_t n) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(gen_()) * n) >> 64);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace beepsim
