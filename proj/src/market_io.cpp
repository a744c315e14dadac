#include "bmlab/market_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace bmlab {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::int32_t> parse_row(std::string_view line, std::size_t lineno, std::size_t n) {
  std::vector<std::int32_t> row;
  row.reserve(n);
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    if (pos >= line.size()) break;
    std::int32_t v = 0;
    auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + line.size(), v);
    if (ec != std::errc{} || (ptr != line.data() + line.size() && *ptr != ' ')) {
      throw ParseError(lineno, "expected integers separated by spaces");
    }
    if (v < 1 || static_cast<std::size_t>(v) > n) {
      throw ParseError(lineno, "entry " + std::to_string(v) + " outside 1.." + std::to_string(n));
    }
    row.push_back(v - 1);
    pos = static_cast<std::size_t>(ptr - line.data());
  }
  if (row.size() != n) {
    throw ParseError(lineno, "row has " + std::to_string(row.size()) + " entries, expected " +
                                 std::to_string(n));
  }
  if (!is_permutation_row(row)) throw ParseError(lineno, "row is not a permutation");
  return row;
}

}  // namespace

Market parse_market(std::string_view text) {
  enum class Section { kHeader, kPrefs, kPrios };
  Section section = Section::kHeader;
  std::size_t n = 0;
  bool seen_prefs = false;
  bool seen_prios = false;
  std::size_t prefs_line = 0;
  std::vector<std::vector<std::int32_t>> prefs;
  std::vector<std::vector<std::int32_t>> prios;

  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = trim(text.substr(start, end - start));
    ++lineno;
    start = end + 1;

    if (line.empty() || line.front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    if (line.starts_with("n=")) {
      if (n != 0) throw ParseError(lineno, "duplicate header n=");
      if (section != Section::kHeader) throw ParseError(lineno, "header n= must come first");
      std::string_view digits = line.substr(2);
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
      if (ec != std::errc{} || ptr != digits.data() + digits.size() || n == 0) {
        throw ParseError(lineno, "malformed header, expected n=<positive integer>");
      }
    } else if (line == "[preferences]") {
      if (n == 0) throw ParseError(lineno, "missing header n=");
      if (seen_prefs || seen_prios) throw ParseError(lineno, "unexpected [preferences] section");
      section = Section::kPrefs;
      seen_prefs = true;
      prefs_line = lineno;
    } else if (line == "[priorities]") {
      if (!seen_prefs) throw ParseError(lineno, "missing [preferences] section");
      if (seen_prios) throw ParseError(lineno, "duplicate [priorities] section");
      if (prefs.size() != n) {
        throw ParseError(lineno, "[preferences] has " + std::to_string(prefs.size()) +
                                     " rows, expected " + std::to_string(n));
      }
      section = Section::kPrios;
      seen_prios = true;
    } else {
      switch (section) {
        case Section::kHeader:
          throw ParseError(lineno, n == 0 ? "malformed header, expected n=<positive integer>"
                                          : "missing [preferences] section");
        case Section::kPrefs:
          if (prefs.size() == n) throw ParseError(lineno, "too many rows in [preferences]");
          prefs.push_back(parse_row(line, lineno, n));
          break;
        case Section::kPrios:
          if (prios.size() == n) throw ParseError(lineno, "too many rows in [priorities]");
          prios.push_back(parse_row(line, lineno, n));
          break;
      }
    }
    if (end == text.size()) break;
  }

  if (n == 0) throw ParseError(lineno, "missing header n=");
  if (!seen_prefs) throw ParseError(lineno, "missing [preferences] section");
  if (!seen_prios) {
    if (prefs.size() != n) {
      throw ParseError(prefs_line, "[preferences] has " + std::to_string(prefs.size()) +
                                       " rows, expected " + std::to_string(n));
    }
    throw ParseError(lineno, "missing [priorities] section");
  }
  if (prios.size() != n) {
    throw ParseError(lineno, "[priorities] has " + std::to_string(prios.size()) +
                                 " rows, expected " + std::to_string(n));
  }
  return make_market(prefs, prios);
}

std::string write_market(const Market& m) {
  std::ostringstream os;
  const std::size_t n = m.size();
  auto emit = [&](const RankingTable& t) {
    for (std::size_t r = 0; r < n; ++r) {
      auto row = t.row(r);
      for (std::size_t k = 0; k < n; ++k) {
        if (k) os << ' ';
        os << row[k] + 1;
      }
      os << '\n';
    }
  };
  os << "# market v1\n" << "n=" << n << '\n' << "[preferences]\n";
  emit(m.preferences());
  os << "[priorities]\n";
  emit(m.priorities());
  return os.str();
}

Market read_market_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open market file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_market(buf.str());
}

void write_market_file(const std::filesystem::path& path, const Market& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write market file " + path.string());
  out << write_market(m);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace bmlab
