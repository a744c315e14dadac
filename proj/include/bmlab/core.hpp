// Domain types for one-to-one school choice markets.
//
// Students and schools are both indexed 0..n-1 internally. Every external
// format (market files, CSV, CLI output) uses 1-based indices.
#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bmlab {

using Student = std::int32_t;
using School = std::int32_t;

/// Thrown when an operation is asked to work on a market larger than its
/// configured cap (brute-force enumeration, the assignment solver).
class UnsupportedSize : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
void* allocate_table(std::size_t bytes);
void deallocate_table(void* p) noexcept;

// Leaves new elements uninitialized (tables are always fully overwritten) and
// backs large tables with huge pages where the platform allows it.
template <typename T>
struct DefaultInitAllocator {
  using value_type = T;
  DefaultInitAllocator() = default;
  template <typename U>
  DefaultInitAllocator(const DefaultInitAllocator<U>&) noexcept {}
  T* allocate(std::size_t count) { return static_cast<T*>(allocate_table(count * sizeof(T))); }
  void deallocate(T* p, std::size_t) noexcept { deallocate_table(p); }
  template <typename U>
  friend bool operator==(const DefaultInitAllocator&, const DefaultInitAllocator<U>&) {
    return true;
  }
  template <typename U>
  void construct(U* p) noexcept {
    ::new (static_cast<void*>(p)) U;
  }
  template <typename U, typename... Args>
  void construct(U* p, Args&&... args) {
    ::new (static_cast<void*>(p)) U(std::forward<Args>(args)...);
  }
};
}  // namespace detail

/// n rows of n entries, each row a ranking (best first). Stored row-major in
/// one allocation so that large markets stay cache friendly. A table built
/// from a size alone has unspecified contents until written.
class RankingTable {
 public:
  RankingTable() = default;
  explicit RankingTable(std::size_t n) : n_(n), data_(n * n) {}
  RankingTable(std::size_t n, const std::vector<std::int32_t>& flat);

  /// Builds from 0-based rows; throws std::invalid_argument unless the rows
  /// form a square table.
  static RankingTable from_rows(const std::vector<std::vector<std::int32_t>>& rows);

  std::size_t size() const { return n_; }
  std::span<const std::int32_t> row(std::size_t r) const {
    return {data_.data() + r * n_, n_};
  }
  std::span<std::int32_t> row(std::size_t r) { return {data_.data() + r * n_, n_}; }
  std::int32_t at(std::size_t r, std::size_t pos) const { return data_[r * n_ + pos]; }

  /// Position of every entry: result.at(r, v) = position of v in row r.
  RankingTable inverse() const;

  std::vector<std::vector<std::int32_t>> rows() const;

  friend bool operator==(const RankingTable&, const RankingTable&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::int32_t, detail::DefaultInitAllocator<std::int32_t>> data_;
};

/// A student's submitted list. Truthful play submits the preference table.
using StrategyProfile = RankingTable;

/// n students, n schools, strict preferences and strict priorities.
///
/// The constructor checks both tables and throws std::invalid_argument on a
/// bad row. The priority position table is built eagerly (every mechanism
/// compares applicants); the preference position table is built on first
/// use, safely under concurrent readers. A Market is immutable.
class Market {
 public:
  struct Trusted {};

  Market() = default;
  Market(RankingTable preferences, RankingTable priorities);
  /// Skips the permutation checks; for generators that build rows as
  /// permutations by construction.
  Market(Trusted, RankingTable preferences, RankingTable priorities);

  std::size_t size() const { return prefs_.size(); }
  const RankingTable& preferences() const { return prefs_; }
  const RankingTable& priorities() const { return prios_; }

  /// 0-based position of `school` in the student's true list.
  std::int32_t pref_pos(Student i, School s) const { return pref_positions().at(i, s); }
  /// 0-based position of `student` in the school's priority list.
  std::int32_t prio_pos(School s, Student i) const { return prio_pos_.at(s, i); }
  const RankingTable& pref_positions() const;
  const RankingTable& prio_positions() const { return prio_pos_; }

  friend bool operator==(const Market& a, const Market& b) {
    return a.prefs_ == b.prefs_ && a.prios_ == b.prios_;
  }

 private:
  struct LazyTable {
    std::once_flag once;
    RankingTable table;
  };

  RankingTable prefs_;
  RankingTable prios_;
  RankingTable prio_pos_;
  std::shared_ptr<LazyTable> pref_pos_;
};

/// Student i is assigned school assignment[i]. `round` is filled in by the
/// round-based mechanisms (1-based round of assignment).
struct Matching {
  std::vector<School> assignment;
  std::vector<std::int32_t> round;

  std::size_t size() const { return assignment.size(); }
  friend bool operator==(const Matching& a, const Matching& b) {
    return a.assignment == b.assignment;
  }
  friend auto operator<=>(const Matching& a, const Matching& b) {
    return a.assignment <=> b.assignment;
  }
};

/// First preference rate and average rank as exact counts over n.
struct MetricPair {
  std::int64_t first_choices = 0;
  std::int64_t rank_sum = 0;
  std::int64_t n = 0;

  double r1() const { return static_cast<double>(first_choices) / static_cast<double>(n); }
  double avg_rank() const { return static_cast<double>(rank_sum) / static_cast<double>(n); }
};

struct Violation {
  std::string section;  // "preferences" or "priorities"
  std::size_t row = 0;  // 1-based; 0 when the whole section is at fault
  std::string reason;

  std::string describe() const;
};

/// Checks that `rows` is n permutations of 0..n-1.
std::optional<Violation> validate_rows(std::string_view section, std::size_t n,
                                       const std::vector<std::vector<std::int32_t>>& rows);

/// Checks both sections of a market given as raw 0-based rows.
std::optional<Violation> validate_market(std::size_t n,
                                         const std::vector<std::vector<std::int32_t>>& prefs,
                                         const std::vector<std::vector<std::int32_t>>& prios);
std::optional<Violation> validate_market(const Market& m);

bool is_permutation_row(std::span<const std::int32_t> row);
bool is_perfect_matching(const Matching& x, std::size_t n);

/// 1-based rank of `s` in student i's true list.
std::int32_t rank_of(const Market& m, Student i, School s);

/// Metrics against true preferences.
MetricPair metrics(const Market& m, const Matching& x);

/// Builds a market from 0-based rows, throwing std::invalid_argument with the
/// violation description if the rows are not valid.
Market make_market(const std::vector<std::vector<std::int32_t>>& prefs,
                   const std::vector<std::vector<std::int32_t>>& prios);

/// Market from 1-based rows, as written in fixtures and files.
Market make_market_1based(const std::vector<std::vector<std::int32_t>>& prefs,
                          const std::vector<std::vector<std::int32_t>>& prios);

Matching matching_1based(const std::vector<std::int32_t>& schools);

namespace fixtures {
/// n=2, both students prefer s1; both schools rank i1 first.
Market m2a();
/// n=3 market whose truthful Boston outcome is unstable and whose stable
/// matching is unique.
Market m3();
}  // namespace fixtures

}  // namespace bmlab
