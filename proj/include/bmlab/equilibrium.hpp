// The Boston preference revelation game under complete information.
//
// Students submit full rankings; the Boston mechanism allocates; outcomes
// are judged by true preferences. Nash outcomes of this game are exactly the
// stable matchings of the true market, which is what lets the experiments
// select equilibria through deferred acceptance.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bmlab/core.hpp"
#include "bmlab/stability.hpp"

namespace bmlab {

inline constexpr std::size_t kNashEnumerationCap = 4;

Matching bm_outcome(const Market& m, const StrategyProfile& profile);

struct BestResponse {
  School best = -1;
  std::vector<School> witness;  // a full report that obtains `best`
};

/// The truly-best school student i can obtain by any unilateral change of
/// report, with a report that obtains it.
///
/// With everyone else's report fixed, an application by i that loses leaves
/// the school's acceptance unchanged, so nobody else's path moves; only i's
/// winning application matters. So the Boston run without i decides
/// everything: a school that took someone in round 1 without i is winnable in
/// round 1 exactly when i outranks that student, and any other school gets no
/// round-1 application at all, so i wins it by listing it first. Every
/// attainable school is therefore attainable in round 1.
BestResponse best_response_bm(const Market& m, const StrategyProfile& profile, Student i);

struct ImprovingDeviation {
  Student student = -1;
  School current = -1;  // what the profile gives the student
  School better = -1;   // best attainable school
  std::vector<School> witness;
};

struct NashCheck {
  bool is_nash = true;
  std::vector<ImprovingDeviation> deviations;  // one per student who can improve
};

NashCheck is_nash_profile(const Market& m, const StrategyProfile& profile);

class UnstableMatching : public std::invalid_argument {
 public:
  UnstableMatching(BlockingPair pair, const std::string& what)
      : std::invalid_argument(what), pair_(pair) {}
  const BlockingPair& blocking_pair() const { return pair_; }

 private:
  BlockingPair pair_;
};

/// Everyone reports their school in `mu` first, then the rest in true order.
/// Boston on this profile places everyone in round 1 and returns `mu`.
/// Throws UnstableMatching (carrying a blocking pair) if `mu` is not stable.
StrategyProfile equilibrium_from_stable(const Market& m, const Matching& mu);

/// Every profile in (n!)^n is checked with is_nash_profile; the Boston
/// outcomes of the Nash profiles are returned sorted and deduplicated.
StableSet enumerate_nash_outcomes(const Market& m, std::size_t cap = kNashEnumerationCap);

enum class SelectionRule { kStudentOptimal, kSchoolOptimal };

std::string_view to_string(SelectionRule rule);
std::optional<SelectionRule> parse_selection_rule(std::string_view name);

/// student_optimal: student-proposing DA on true preferences.
/// school_optimal: school-proposing DA.
Matching select_equilibrium(const Market& m, SelectionRule rule);

}  // namespace bmlab
