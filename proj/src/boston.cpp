#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bmlab/mechanisms.hpp"

namespace bmlab {

BostonResult boston(const Market& m, const StrategyProfile& reports, bool record_trace) {
  const std::size_t n = m.size();
  if (reports.size() != n) throw std::invalid_argument("boston: profile size != market size");

  BostonResult out;
  out.matching.assignment.assign(n, -1);
  out.matching.round.assign(n, 0);

  std::vector<char> filled(n, 0);
  std::vector<Student> best(n, -1);  // best applicant to each school this round
  std::vector<School> touched;
  std::vector<Student> waiting(n);
  for (std::size_t i = 0; i < n; ++i) waiting[i] = static_cast<Student>(i);
  std::vector<Student> still_waiting;
  std::vector<std::pair<School, Student>> applications;

  for (std::size_t k = 0; !waiting.empty(); ++k) {
    if (k >= n) throw std::logic_error("boston: students left after n rounds");
    const auto round = static_cast<std::int32_t>(k + 1);
    touched.clear();
    if (record_trace) applications.clear();

    for (Student i : waiting) {
      const School s = reports.at(i, k);
      if (record_trace) applications.emplace_back(s, i);
      if (filled[s]) continue;
      if (best[s] < 0) {
        best[s] = i;
        touched.push_back(s);
      } else if (m.prio_pos(s, i) < m.prio_pos(s, best[s])) {
        best[s] = i;
      }
    }

    for (School s : touched) {
      const Student i = best[s];
      filled[s] = 1;
      out.matching.assignment[i] = s;
      out.matching.round[i] = round;
      best[s] = -1;
    }
    if (!touched.empty()) out.rounds = round;

    if (record_trace) {
      std::sort(applications.begin(), applications.end());
      for (std::size_t a = 0; a < applications.size();) {
        RoundRecord rec;
        rec.round = round;
        rec.school = applications[a].first;
        while (a < applications.size() && applications[a].first == rec.school) {
          rec.applicants.push_back(applications[a].second);
          ++a;
        }
        for (Student i : rec.applicants) {
          if (out.matching.assignment[i] == rec.school && out.matching.round[i] == round) {
            rec.accepted = i;
          }
        }
        out.trace.push_back(std::move(rec));
      }
    }

    still_waiting.clear();
    for (Student i : waiting) {
      if (out.matching.assignment[i] < 0) still_waiting.push_back(i);
    }
    waiting.swap(still_waiting);
  }
  return out;
}

double expected_round1_fraction(std::size_t n) {
  if (n == 0) throw std::invalid_argument("expected_round1_fraction: n must be >= 1");
  const double nn = static_cast<double>(n);
  // (1 - 1/n)^n through log1p keeps precision for large n.
  return -std::expm1(nn * std::log1p(-1.0 / nn));
}

}  // namespace bmlab
