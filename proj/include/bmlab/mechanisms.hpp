// Allocation procedures. Every mechanism takes the market (for priorities)
// and, where strategic reports matter, a StrategyProfile; pass
// m.preferences() for truthful play.
#pragma once

#include <cstdint>
#include <vector>

#include "bmlab/core.hpp"

namespace bmlab {

/// One school's activity in one Boston round.
struct RoundRecord {
  std::int32_t round = 0;  // 1-based
  School school = 0;
  std::vector<Student> applicants;  // in student index order
  Student accepted = -1;            // -1 if the school was already filled
};

using RoundTrace = std::vector<RoundRecord>;

struct BostonResult {
  Matching matching;         // round[] populated
  std::int32_t rounds = 0;   // last round in which anyone was assigned
  RoundTrace trace;          // empty unless requested
};

/// Boston / immediate acceptance. In round k every unassigned student applies
/// to the k-th school on their report; each unfilled school that receives
/// applications permanently takes its highest-priority applicant.
BostonResult boston(const Market& m, const StrategyProfile& reports, bool record_trace = false);

struct DeferredAcceptanceResult {
  Matching matching;
  std::int64_t proposals = 0;
};

/// Student-proposing deferred acceptance on (reports, priorities): the
/// student-optimal stable matching for those reports.
DeferredAcceptanceResult da_students(const Market& m, const StrategyProfile& reports);

/// School-proposing deferred acceptance on the true preferences: the
/// school-optimal stable matching.
DeferredAcceptanceResult da_schools(const Market& m);

/// Students pick their favourite remaining school in `order`.
Matching serial_dictatorship(const Market& m, const std::vector<Student>& order);

/// Top trading cycles. All cycles of a pointing round are cleared together.
Matching ttc(const Market& m);

inline constexpr std::size_t kRankMinimizingCap = 4096;

/// Perfect matching of minimum total rank; among optimal matchings the
/// lexicographically smallest assignment vector is returned.
Matching rank_minimizing(const Market& m, std::size_t cap = kRankMinimizingCap);

/// 1 - (1 - 1/n)^n: expected share of students placed in Boston's first round
/// under truthful uniform random preferences.
double expected_round1_fraction(std::size_t n);

}  // namespace bmlab
