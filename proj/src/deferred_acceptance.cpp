#include <stdexcept>

#include "bmlab/mechanisms.hpp"

namespace bmlab {

DeferredAcceptanceResult da_students(const Market& m, const StrategyProfile& reports) {
  const std::size_t n = m.size();
  if (reports.size() != n) throw std::invalid_argument("da_students: profile size != market size");

  std::vector<std::int32_t> next(n, 0);   // next position on each report
  std::vector<Student> holder(n, -1);     // tentative student at each school
  std::vector<Student> free_students;
  free_students.reserve(n);
  for (std::size_t i = n; i-- > 0;) free_students.push_back(static_cast<Student>(i));

  DeferredAcceptanceResult out;
  while (!free_students.empty()) {
    Student i = free_students.back();
    free_students.pop_back();
    // i proposes down their list until held somewhere or rejected by a holder
    // that outranks them; a displaced holder becomes free.
    for (;;) {
      if (static_cast<std::size_t>(next[i]) >= n) {
        throw std::logic_error("da_students: student exhausted their list");
      }
      const School s = reports.at(i, next[i]++);
      ++out.proposals;
      const Student h = holder[s];
      if (h < 0) {
        holder[s] = i;
        break;
      }
      if (m.prio_pos(s, i) < m.prio_pos(s, h)) {
        holder[s] = i;
        i = h;
      }
    }
  }

  out.matching.assignment.assign(n, -1);
  for (std::size_t s = 0; s < n; ++s) out.matching.assignment[holder[s]] = static_cast<School>(s);
  return out;
}

DeferredAcceptanceResult da_schools(const Market& m) {
  const std::size_t n = m.size();
  const RankingTable& prios = m.priorities();

  std::vector<std::int32_t> next(n, 0);
  std::vector<School> holder(n, -1);  // tentative school held by each student
  std::vector<School> free_schools;
  free_schools.reserve(n);
  for (std::size_t s = n; s-- > 0;) free_schools.push_back(static_cast<School>(s));

  DeferredAcceptanceResult out;
  while (!free_schools.empty()) {
    School s = free_schools.back();
    free_schools.pop_back();
    for (;;) {
      if (static_cast<std::size_t>(next[s]) >= n) {
        throw std::logic_error("da_schools: school exhausted its list");
      }
      const Student i = prios.at(s, next[s]++);
      ++out.proposals;
      const School h = holder[i];
      if (h < 0) {
        holder[i] = s;
        break;
      }
      if (m.pref_pos(i, s) < m.pref_pos(i, h)) {
        holder[i] = s;
        s = h;
      }
    }
  }

  out.matching.assignment = std::move(holder);
  return out;
}

}  // namespace bmlab
