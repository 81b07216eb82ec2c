#pragma once

#include <cstdint>
#include <random>

namespace qlocal {

/// Deterministic random source. Every stochastic routine takes one of these
/// explicitly; there is no ambient entropy anywhere in the library. Child
/// streams are derived from the master seed in counter mode, so sharded
/// Monte Carlo runs reproduce bit-for-bit regardless of scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : master_(seed), engine_(scramble(seed)) {}

  /// Child stream `k` of this generator's master seed.
  Rng fork(std::uint64_t k) const { return Rng(scramble(master_ ^ (0x9e3779b97f4a7c15ull * (k + 1)))); }

  std::uint64_t master_seed() const { return master_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_unit() < p; }

  /// Uniform in [0, bound). Rejection-free multiply-shift; deterministic.
  std::uint32_t uniform_u32(std::uint32_t bound) {
    return static_cast<std::uint32_t>((static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  std::uint64_t uniform_u64(std::uint64_t bound) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  bool next_bit() { return (next_u64() >> 63) != 0; }

 private:
  static std::uint64_t scramble(std::uint64_t x) {
    // SplitMix64 finalizer.
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::uint64_t master_;
  std::mt19937_64 engine_;
};

}  // namespace qlocal
