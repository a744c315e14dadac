// Reproducible uniform random markets.
//
// Generator: xoshiro256** (Blackman & Vigna), state seeded by expanding a
// 64-bit seed through splitmix64. Bounded draws use Lemire's
// multiply-shift with rejection, so every permutation is exactly equally
// likely. Both are fully specified here and produce the same stream on every
// platform, which std:: distributions do not guarantee.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "bmlab/core.hpp"

namespace bmlab {

/// One splitmix64 output step applied to `x` (the finalizer plus the golden
/// ratio increment). Good avalanche; used for seed derivation.
std::uint64_t mix64(std::uint64_t x);

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  /// 32-bit draws: the high half of a 64-bit output, then its low half.
  std::uint32_t next32();
  std::uint64_t operator()() { return next(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  /// Uniform integer in [0, bound). bound must be positive. Bounds up to
  /// 2^32 consume 32-bit draws.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::array<std::uint64_t, 4> s_{};
  std::uint32_t spare_ = 0;
  bool has_spare_ = false;
};

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t rep_index = 0;
};

/// Seed of replication `rep` under `master`:
///   mix64(mix64(master) ^ (rep * 0xD1B54A32D192ED03))
/// The odd multiplier spreads consecutive rep indices before the second
/// mixing round, so (master, rep) pairs that differ anywhere land far apart.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t rep);

/// Uniform permutation of 0..k-1 (Fisher-Yates, last position first).
std::vector<std::int32_t> sample_permutation(std::size_t k, Rng& rng);
void shuffle_in_place(std::span<std::int32_t> values, Rng& rng);

/// n preference rows then n priority rows, each a fresh uniform permutation
/// drawn from `rng` in that order.
Market sample_market(std::size_t n, Rng& rng);
Market sample_market(std::size_t n, const SeedSpec& seed);

}  // namespace bmlab
