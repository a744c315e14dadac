#include "bmlab/equilibrium.hpp"

#include <algorithm>
#include <numeric>

#include "bmlab/mechanisms.hpp"

namespace bmlab {

Matching bm_outcome(const Market& m, const StrategyProfile& profile) {
  return boston(m, profile).matching;
}

namespace {

// Round-1 winners of the Boston run with student `absent` removed. A school
// with no round-1 application maps to -1.
std::vector<Student> round1_winners_without(const Market& m, const StrategyProfile& profile,
                                            Student absent) {
  const std::size_t n = m.size();
  std::vector<Student> winner(n, -1);
  for (std::size_t j = 0; j < n; ++j) {
    const auto other = static_cast<Student>(j);
    if (other == absent) continue;
    const School s = profile.at(j, 0);
    if (winner[s] < 0 || m.prio_pos(s, other) < m.prio_pos(s, winner[s])) winner[s] = other;
  }
  return winner;
}

std::vector<School> report_with_first(const Market& m, Student i, School first) {
  std::vector<School> report;
  report.reserve(m.size());
  report.push_back(first);
  for (School s : m.preferences().row(i)) {
    if (s != first) report.push_back(s);
  }
  return report;
}

}  // namespace

BestResponse best_response_bm(const Market& m, const StrategyProfile& profile, Student i) {
  const std::size_t n = m.size();
  if (profile.size() != n) throw std::invalid_argument("best_response_bm: profile size mismatch");
  if (i < 0 || static_cast<std::size_t>(i) >= n) {
    throw std::out_of_range("best_response_bm: student out of range");
  }
  const std::vector<Student> winner = round1_winners_without(m, profile, i);
  // Walk i's true list; the first attainable school is the best response.
  for (School s : m.preferences().row(i)) {
    if (winner[s] < 0 || m.prio_pos(s, i) < m.prio_pos(s, winner[s])) {
      return BestResponse{s, report_with_first(m, i, s)};
    }
  }
  throw std::logic_error("best_response_bm: no attainable school");
}

NashCheck is_nash_profile(const Market& m, const StrategyProfile& profile) {
  const Matching outcome = bm_outcome(m, profile);
  NashCheck check;
  for (std::size_t j = 0; j < m.size(); ++j) {
    const auto i = static_cast<Student>(j);
    BestResponse br = best_response_bm(m, profile, i);
    if (m.pref_pos(i, br.best) < m.pref_pos(i, outcome.assignment[j])) {
      check.is_nash = false;
      check.deviations.push_back({i, outcome.assignment[j], br.best, std::move(br.witness)});
    }
  }
  return check;
}

StrategyProfile equilibrium_from_stable(const Market& m, const Matching& mu) {
  const auto blocking = blocking_pairs(m, mu);
  if (!blocking.empty()) {
    const BlockingPair& bp = blocking.front();
    throw UnstableMatching(bp, "equilibrium_from_stable: matching is blocked by (student " +
                                   std::to_string(bp.student + 1) + ", school " +
                                   std::to_string(bp.school + 1) + ")");
  }
  const std::size_t n = m.size();
  StrategyProfile profile(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto report = report_with_first(m, static_cast<Student>(j), mu.assignment[j]);
    std::copy(report.begin(), report.end(), profile.row(j).begin());
  }
  return profile;
}

StableSet enumerate_nash_outcomes(const Market& m, std::size_t cap) {
  const std::size_t n = m.size();
  if (n > cap) {
    throw UnsupportedSize("enumerate_nash_outcomes: n=" + std::to_string(n) + " exceeds cap " +
                          std::to_string(cap));
  }
  std::vector<std::vector<School>> perms;
  std::vector<School> p(n);
  std::iota(p.begin(), p.end(), 0);
  do {
    perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));

  // Odometer over one permutation index per student.
  std::vector<std::size_t> digit(n, 0);
  StrategyProfile profile(n);
  for (std::size_t j = 0; j < n; ++j) std::copy(perms[0].begin(), perms[0].end(), profile.row(j).begin());

  StableSet outcomes;
  for (;;) {
    if (is_nash_profile(m, profile).is_nash) outcomes.push_back(bm_outcome(m, profile));
    std::size_t j = 0;
    while (j < n && ++digit[j] == perms.size()) {
      digit[j] = 0;
      std::copy(perms[0].begin(), perms[0].end(), profile.row(j).begin());
      ++j;
    }
    if (j == n) break;
    std::copy(perms[digit[j]].begin(), perms[digit[j]].end(), profile.row(j).begin());
  }
  for (auto& x : outcomes) x.round.clear();
  std::sort(outcomes.begin(), outcomes.end());
  outcomes.erase(std::unique(outcomes.begin(), outcomes.end()), outcomes.end());
  return outcomes;
}

std::string_view to_string(SelectionRule rule) {
  switch (rule) {
    case SelectionRule::kStudentOptimal:
      return "student_optimal";
    case SelectionRule::kSchoolOptimal:
      return "school_optimal";
  }
  return "unknown";
}

std::optional<SelectionRule> parse_selection_rule(std::string_view name) {
  if (name == "student_optimal") return SelectionRule::kStudentOptimal;
  if (name == "school_optimal") return SelectionRule::kSchoolOptimal;
  return std::nullopt;
}

Matching select_equilibrium(const Market& m, SelectionRule rule) {
  switch (rule) {
    case SelectionRule::kStudentOptimal:
      return da_students(m, m.preferences()).matching;
    case SelectionRule::kSchoolOptimal:
      return da_schools(m).matching;
  }
  throw std::invalid_argument("select_equilibrium: unknown rule");
}

}  // namespace bmlab
