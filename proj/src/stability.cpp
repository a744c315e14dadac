#include "bmlab/stability.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace bmlab {

std::vector<BlockingPair> blocking_pairs(const Market& m, const Matching& x) {
  const std::size_t n = m.size();
  if (!is_perfect_matching(x, n)) {
    throw std::invalid_argument("blocking_pairs: not a perfect matching of this market");
  }
  std::vector<Student> assignee(n);
  for (std::size_t i = 0; i < n; ++i) assignee[x.assignment[i]] = static_cast<Student>(i);

  std::vector<BlockingPair> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto student = static_cast<Student>(i);
    const auto prefs = m.preferences().row(i);
    // Only schools ahead of x_i on i's list can block.
    for (School s : prefs) {
      if (s == x.assignment[i]) break;
      if (m.prio_pos(s, student) < m.prio_pos(s, assignee[s])) out.push_back({student, s});
    }
  }
  std::sort(out.begin(), out.end(), [](const BlockingPair& a, const BlockingPair& b) {
    return std::pair(a.student, a.school) < std::pair(b.student, b.school);
  });
  return out;
}

bool is_stable(const Market& m, const Matching& x) { return blocking_pairs(m, x).empty(); }

namespace {

bool stable_fast(const Market& m, const std::vector<School>& assignment,
                 const std::vector<Student>& assignee) {
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto student = static_cast<Student>(i);
    for (School s : m.preferences().row(i)) {
      if (s == assignment[i]) break;
      if (m.prio_pos(s, student) < m.prio_pos(s, assignee[s])) return false;
    }
  }
  return true;
}

}  // namespace

StableSet enumerate_stable(const Market& m, std::size_t cap) {
  const std::size_t n = m.size();
  if (n > cap) {
    throw UnsupportedSize("enumerate_stable: n=" + std::to_string(n) + " exceeds cap " +
                          std::to_string(cap) + "; use da_students/da_schools for larger markets");
  }
  std::vector<School> assignment(n);
  std::iota(assignment.begin(), assignment.end(), 0);
  std::vector<Student> assignee(n);
  StableSet out;
  // next_permutation walks assignments in lexicographic order, so the result
  // is sorted and duplicate-free by construction.
  do {
    for (std::size_t i = 0; i < n; ++i) assignee[assignment[i]] = static_cast<Student>(i);
    if (stable_fast(m, assignment, assignee)) out.push_back(Matching{assignment, {}});
  } while (std::next_permutation(assignment.begin(), assignment.end()));
  return out;
}

}  // namespace bmlab
