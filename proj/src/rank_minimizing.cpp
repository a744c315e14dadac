#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "bmlab/mechanisms.hpp"

namespace bmlab {

namespace {

struct AssignmentSolution {
  std::vector<std::int32_t> row_to_col;
  std::vector<std::int64_t> row_potential;
  std::vector<std::int64_t> col_potential;
};

// Shortest augmenting path Hungarian method on a dense n x n cost matrix
// (cost(r, c) callable). Potentials satisfy cost - u - v >= 0 with equality on
// the returned assignment.
template <typename Cost>
AssignmentSolution solve_assignment(std::size_t n, Cost cost) {
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  // 1-based internally; index 0 is the virtual root column.
  std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
  std::vector<std::int32_t> col_owner(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);

  for (std::size_t r = 1; r <= n; ++r) {
    col_owner[0] = static_cast<std::int32_t>(r);
    std::size_t c0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[c0] = 1;
      const std::size_t r0 = static_cast<std::size_t>(col_owner[c0]);
      std::int64_t delta = kInf;
      std::size_t c1 = 0;
      for (std::size_t c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const std::int64_t cur = cost(r0 - 1, c - 1) - u[r0] - v[c];
        if (cur < minv[c]) {
          minv[c] = cur;
          way[c] = static_cast<std::int32_t>(c0);
        }
        if (minv[c] < delta) {
          delta = minv[c];
          c1 = c;
        }
      }
      for (std::size_t c = 0; c <= n; ++c) {
        if (used[c]) {
          u[static_cast<std::size_t>(col_owner[c])] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      c0 = c1;
    } while (col_owner[c0] != 0);
    do {
      const std::size_t c1 = static_cast<std::size_t>(way[c0]);
      col_owner[c0] = col_owner[c1];
      c0 = c1;
    } while (c0 != 0);
  }

  AssignmentSolution sol;
  sol.row_to_col.assign(n, -1);
  sol.row_potential.assign(n, 0);
  sol.col_potential.assign(n, 0);
  for (std::size_t c = 1; c <= n; ++c) {
    sol.row_to_col[static_cast<std::size_t>(col_owner[c]) - 1] = static_cast<std::int32_t>(c - 1);
  }
  for (std::size_t r = 0; r < n; ++r) sol.row_potential[r] = u[r + 1];
  for (std::size_t c = 0; c < n; ++c) sol.col_potential[c] = v[c + 1];
  return sol;
}

// Given an optimal assignment and optimal potentials, every optimal
// assignment lives on the tight edges. Walk students in order and move each
// one to the smallest tight school that still admits a perfect matching on
// the tight graph among the not-yet-fixed students.
void lexicographic_refine(std::size_t n, const std::vector<std::vector<std::int32_t>>& tight,
                          std::vector<std::int32_t>& row_to_col) {
  std::vector<std::int32_t> col_to_row(n);
  for (std::size_t r = 0; r < n; ++r) col_to_row[row_to_col[r]] = static_cast<std::int32_t>(r);
  std::vector<char> fixed(n, 0);
  std::vector<std::int32_t> visited(n, -1);  // per student, last search stamp
  std::vector<std::int32_t> parent_col(n);   // column a reached student currently holds
  std::vector<std::int32_t> pred(n);         // student whose search reached this one
  std::vector<std::int32_t> queue;
  std::int32_t stamp = 0;

  for (std::size_t i = 0; i < n; ++i) {
    const std::int32_t current = row_to_col[i];
    for (std::int32_t s : tight[i]) {  // tight[i] is sorted
      if (s >= current) break;
      const std::int32_t j = col_to_row[s];
      if (fixed[j]) continue;
      // BFS over unfixed students for an alternating path from j to `current`.
      ++stamp;
      queue.clear();
      queue.push_back(j);
      visited[j] = stamp;
      visited[i] = stamp;
      parent_col[j] = s;
      pred[j] = static_cast<std::int32_t>(i);
      std::int32_t end_student = -1;
      for (std::size_t q = 0; q < queue.size() && end_student < 0; ++q) {
        const std::int32_t a = queue[q];
        for (std::int32_t t : tight[a]) {
          if (t == parent_col[a]) continue;
          if (t == current) {
            end_student = a;
            break;
          }
          const std::int32_t b = col_to_row[t];
          if (fixed[b] || visited[b] == stamp) continue;
          visited[b] = stamp;
          parent_col[b] = t;
          pred[b] = a;
          queue.push_back(b);
        }
      }
      if (end_student < 0) continue;
      // Rotate along the path: end_student takes `current`, every student on
      // the path takes the column held by its successor, and i takes s.
      std::int32_t a = end_student;
      std::int32_t take = current;
      for (;;) {
        const std::int32_t held = row_to_col[a];
        row_to_col[a] = take;
        col_to_row[take] = a;
        if (a == static_cast<std::int32_t>(i)) break;
        take = held;
        a = pred[a];
      }
      break;
    }
    fixed[i] = 1;
  }
}

}  // namespace

Matching rank_minimizing(const Market& m, std::size_t cap) {
  const std::size_t n = m.size();
  if (n > cap) {
    throw UnsupportedSize("rank_minimizing: n=" + std::to_string(n) + " exceeds cap " +
                          std::to_string(cap));
  }
  const RankingTable& pos = m.pref_positions();
  auto cost = [&](std::size_t r, std::size_t c) -> std::int64_t { return pos.at(r, c); };
  AssignmentSolution sol = solve_assignment(n, cost);

  std::vector<std::vector<std::int32_t>> tight(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      if (cost(r, c) - sol.row_potential[r] - sol.col_potential[c] == 0) {
        tight[r].push_back(static_cast<std::int32_t>(c));
      }
    }
  }
  lexicographic_refine(n, tight, sol.row_to_col);

  Matching x;
  x.assignment = std::move(sol.row_to_col);
  return x;
}

}  // namespace bmlab
