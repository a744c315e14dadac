#include "bmlab/core.hpp"

#include <algorithm>
#include <cstdlib>
#include <new>
#include <sstream>

#if defined(__linux__)
#include <sys/mman.h>
#endif

namespace bmlab {

namespace detail {

namespace {
constexpr std::size_t kHugePage = std::size_t{2} << 20;
}

void* allocate_table(std::size_t bytes) {
  if (bytes >= 16 * kHugePage) {
    const std::size_t rounded = (bytes + kHugePage - 1) / kHugePage * kHugePage;
    void* p = std::aligned_alloc(kHugePage, rounded);
    if (p == nullptr) throw std::bad_alloc();
#if defined(__linux__) && defined(MADV_HUGEPAGE)
    ::madvise(p, rounded, MADV_HUGEPAGE);
#endif
    return p;
  }
  void* p = std::malloc(bytes == 0 ? 1 : bytes);
  if (p == nullptr) throw std::bad_alloc();
  return p;
}

void deallocate_table(void* p) noexcept { std::free(p); }

}  // namespace detail

RankingTable::RankingTable(std::size_t n, const std::vector<std::int32_t>& flat)
    : n_(n), data_(flat.begin(), flat.end()) {
  if (data_.size() != n_ * n_) {
    throw std::invalid_argument("ranking table needs n*n entries");
  }
}

RankingTable RankingTable::from_rows(const std::vector<std::vector<std::int32_t>>& rows) {
  const std::size_t n = rows.size();
  RankingTable t(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (rows[r].size() != n) {
      throw std::invalid_argument("row " + std::to_string(r + 1) + " has " +
                                  std::to_string(rows[r].size()) + " entries, expected " +
                                  std::to_string(n));
    }
    std::copy(rows[r].begin(), rows[r].end(), t.row(r).begin());
  }
  return t;
}

RankingTable RankingTable::inverse() const {
  RankingTable inv(n_);
  for (std::size_t r = 0; r < n_; ++r) {
    const std::int32_t* src = data_.data() + r * n_;
    std::int32_t* dst = inv.data_.data() + r * n_;
    for (std::size_t pos = 0; pos < n_; ++pos) {
      dst[src[pos]] = static_cast<std::int32_t>(pos);
    }
  }
  return inv;
}

std::vector<std::vector<std::int32_t>> RankingTable::rows() const {
  std::vector<std::vector<std::int32_t>> out(n_);
  for (std::size_t r = 0; r < n_; ++r) {
    auto src = row(r);
    out[r].assign(src.begin(), src.end());
  }
  return out;
}

bool is_permutation_row(std::span<const std::int32_t> row) {
  std::vector<char> seen(row.size(), 0);
  for (std::int32_t v : row) {
    if (v < 0 || static_cast<std::size_t>(v) >= row.size() || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

namespace {

std::optional<Violation> check_table(std::string_view section, const RankingTable& t) {
  for (std::size_t r = 0; r < t.size(); ++r) {
    if (!is_permutation_row(t.row(r))) {
      return Violation{std::string(section), r + 1, "not a permutation"};
    }
  }
  return std::nullopt;
}

}  // namespace

Market::Market(RankingTable preferences, RankingTable priorities)
    : prefs_(std::move(preferences)), prios_(std::move(priorities)) {
  if (prefs_.size() == 0) throw std::invalid_argument("market must have n >= 1");
  if (prefs_.size() != prios_.size()) {
    throw std::invalid_argument("preferences and priorities differ in size");
  }
  if (auto v = check_table("preferences", prefs_)) throw std::invalid_argument(v->describe());
  if (auto v = check_table("priorities", prios_)) throw std::invalid_argument(v->describe());
  prio_pos_ = prios_.inverse();
  pref_pos_ = std::make_shared<LazyTable>();
}

Market::Market(Trusted, RankingTable preferences, RankingTable priorities)
    : prefs_(std::move(preferences)), prios_(std::move(priorities)) {
  if (prefs_.size() == 0 || prefs_.size() != prios_.size()) {
    throw std::invalid_argument("market tables must be non-empty and of equal size");
  }
  prio_pos_ = prios_.inverse();
  pref_pos_ = std::make_shared<LazyTable>();
}

const RankingTable& Market::pref_positions() const {
  if (!pref_pos_) throw std::logic_error("empty market has no preference positions");
  std::call_once(pref_pos_->once, [this] { pref_pos_->table = prefs_.inverse(); });
  return pref_pos_->table;
}

std::string Violation::describe() const {
  std::ostringstream os;
  os << section << ": ";
  if (row > 0) os << "row " << row << ' ';
  os << reason;
  return os.str();
}

std::optional<Violation> validate_rows(std::string_view section, std::size_t n,
                                       const std::vector<std::vector<std::int32_t>>& rows) {
  if (rows.size() != n) {
    std::string what = section == "preferences" ? "prefs" : std::string(section);
    return Violation{std::string(section), 0, what + " length != n"};
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != n) {
      return Violation{std::string(section), r + 1,
                       "has " + std::to_string(rows[r].size()) + " entries, expected " +
                           std::to_string(n)};
    }
    if (!is_permutation_row(rows[r])) {
      return Violation{std::string(section), r + 1, "not a permutation"};
    }
  }
  return std::nullopt;
}

std::optional<Violation> validate_market(std::size_t n,
                                         const std::vector<std::vector<std::int32_t>>& prefs,
                                         const std::vector<std::vector<std::int32_t>>& prios) {
  if (n == 0) return Violation{"preferences", 0, "n must be positive"};
  if (auto v = validate_rows("preferences", n, prefs)) return v;
  return validate_rows("priorities", n, prios);
}

std::optional<Violation> validate_market(const Market& m) {
  if (m.size() == 0) return Violation{"preferences", 0, "n must be positive"};
  if (m.priorities().size() != m.size()) {
    return Violation{"priorities", 0, "priorities length != n"};
  }
  if (auto v = check_table("preferences", m.preferences())) return v;
  return check_table("priorities", m.priorities());
}

bool is_perfect_matching(const Matching& x, std::size_t n) {
  return x.assignment.size() == n && is_permutation_row(x.assignment);
}

std::int32_t rank_of(const Market& m, Student i, School s) {
  const auto n = static_cast<std::int32_t>(m.size());
  if (i < 0 || i >= n || s < 0 || s >= n) {
    throw std::out_of_range("rank_of: index out of range");
  }
  return m.pref_pos(i, s) + 1;
}

MetricPair metrics(const Market& m, const Matching& x) {
  if (x.size() != m.size()) throw std::invalid_argument("metrics: matching size != market size");
  MetricPair out;
  out.n = static_cast<std::int64_t>(m.size());
  const auto n = static_cast<School>(m.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const School s = x.assignment[i];
    if (s < 0 || s >= n) throw std::out_of_range("metrics: school index out of range");
    // A linear scan avoids building the full position table for one lookup
    // per student.
    const auto row = m.preferences().row(i);
    const auto r = static_cast<std::int32_t>(std::find(row.begin(), row.end(), s) - row.begin()) + 1;
    out.rank_sum += r;
    if (r == 1) ++out.first_choices;
  }
  return out;
}

Market make_market(const std::vector<std::vector<std::int32_t>>& prefs,
                   const std::vector<std::vector<std::int32_t>>& prios) {
  if (auto v = validate_market(prefs.size(), prefs, prios)) {
    throw std::invalid_argument(v->describe());
  }
  return Market(RankingTable::from_rows(prefs), RankingTable::from_rows(prios));
}

namespace {

std::vector<std::vector<std::int32_t>> shift_down(std::vector<std::vector<std::int32_t>> rows) {
  for (auto& r : rows) {
    for (auto& v : r) --v;
  }
  return rows;
}

}  // namespace

Market make_market_1based(const std::vector<std::vector<std::int32_t>>& prefs,
                          const std::vector<std::vector<std::int32_t>>& prios) {
  return make_market(shift_down(prefs), shift_down(prios));
}

Matching matching_1based(const std::vector<std::int32_t>& schools) {
  Matching x;
  x.assignment.reserve(schools.size());
  for (auto s : schools) x.assignment.push_back(s - 1);
  return x;
}

namespace fixtures {

Market m2a() { return make_market_1based({{1, 2}, {1, 2}}, {{1, 2}, {1, 2}}); }

Market m3() {
  return make_market_1based({{2, 1, 3}, {1, 2, 3}, {1, 2, 3}},
                            {{1, 3, 2}, {2, 1, 3}, {2, 1, 3}});
}

}  // namespace fixtures

}  // namespace bmlab
