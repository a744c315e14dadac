// Brute-force reference computations used only by the tests. Each one is
// written from the definitions, without calling the routine it checks.
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "bmlab/core.hpp"
#include "bmlab/mechanisms.hpp"

namespace oracle {

using bmlab::Market;
using bmlab::Matching;

inline std::vector<std::vector<std::int32_t>> all_permutations(std::size_t n) {
  std::vector<std::vector<std::int32_t>> out;
  std::vector<std::int32_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline int true_pos(const Market& m, int i, int s) {
  const auto row = m.preferences().row(i);
  return static_cast<int>(std::find(row.begin(), row.end(), s) - row.begin());
}

inline int prio_pos(const Market& m, int s, int i) {
  const auto row = m.priorities().row(s);
  return static_cast<int>(std::find(row.begin(), row.end(), i) - row.begin());
}

/// Stability straight from the definition: no (i, s) that both prefer each
/// other to their partners.
inline bool stable(const Market& m, const std::vector<std::int32_t>& x) {
  const int n = static_cast<int>(m.size());
  std::vector<int> holder(n);
  for (int i = 0; i < n; ++i) holder[x[i]] = i;
  for (int i = 0; i < n; ++i) {
    for (int s = 0; s < n; ++s) {
      if (true_pos(m, i, s) < true_pos(m, i, x[i]) && prio_pos(m, s, i) < prio_pos(m, s, holder[s])) {
        return false;
      }
    }
  }
  return true;
}

inline std::vector<Matching> stable_set(const Market& m) {
  std::vector<Matching> out;
  for (auto& x : all_permutations(m.size())) {
    if (stable(m, x)) out.push_back(Matching{x, {}});
  }
  return out;
}

inline long total_rank(const Market& m, const std::vector<std::int32_t>& x) {
  long sum = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += true_pos(m, static_cast<int>(i), x[i]) + 1;
  return sum;
}

/// Minimum total rank over all n! matchings, lexicographically first winner.
inline Matching rank_minimizing(const Market& m) {
  long best = std::numeric_limits<long>::max();
  std::vector<std::int32_t> arg;
  for (auto& x : all_permutations(m.size())) {
    const long t = total_rank(m, x);
    if (t < best) {
      best = t;
      arg = x;
    }
  }
  return Matching{arg, {}};
}

/// Best true position student i reaches over all n! reports, others fixed.
inline int best_attainable_pos(const Market& m, const bmlab::StrategyProfile& profile, int i) {
  bmlab::StrategyProfile p = profile;
  int best = std::numeric_limits<int>::max();
  for (auto& report : all_permutations(m.size())) {
    std::copy(report.begin(), report.end(), p.row(i).begin());
    const auto x = bmlab::boston(m, p).matching;
    best = std::min(best, true_pos(m, i, x.assignment[i]));
  }
  return best;
}

/// Same search for any mechanism mapping (market, reports) to a matching.
template <typename Mechanism>
int best_attainable_pos_with(const Market& m, int i, Mechanism mech) {
  bmlab::StrategyProfile p = m.preferences();
  int best = std::numeric_limits<int>::max();
  for (auto& report : all_permutations(m.size())) {
    std::copy(report.begin(), report.end(), p.row(i).begin());
    best = std::min(best, true_pos(m, i, mech(p).assignment[i]));
  }
  return best;
}

inline double chi_square(const std::vector<long>& counts, double expected) {
  double stat = 0;
  for (long c : counts) stat += (c - expected) * (c - expected) / expected;
  return stat;
}

}  // namespace oracle
