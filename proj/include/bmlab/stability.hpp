// Blocking pairs and brute-force enumeration of stable matchings.
#pragma once

#include <utility>
#include <vector>

#include "bmlab/core.hpp"

namespace bmlab {

inline constexpr std::size_t kEnumerationCap = 8;

/// Stable matchings, sorted by assignment vector, no duplicates.
using StableSet = std::vector<Matching>;

struct BlockingPair {
  Student student;
  School school;
  friend bool operator==(const BlockingPair&, const BlockingPair&) = default;
};

/// All (i, s) where i prefers s to x_i and s prefers i to its assignee,
/// ordered by student then school.
std::vector<BlockingPair> blocking_pairs(const Market& m, const Matching& x);

bool is_stable(const Market& m, const Matching& x);

/// Scans all n! perfect matchings. Throws UnsupportedSize above `cap`; use
/// da_students / da_schools for the lattice endpoints of larger markets.
StableSet enumerate_stable(const Market& m, std::size_t cap = kEnumerationCap);

}  // namespace bmlab
