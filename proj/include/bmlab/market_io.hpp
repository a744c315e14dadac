// Text format for markets:
//
//   # market v1
//   n=3
//   [preferences]
//   2 1 3
//   ...
//   [priorities]
//   1 3 2
//   ...
//
// Preference rows are students 1..n (best school first), priority rows are
// schools 1..n (highest-priority student first). Lines starting with '#' are
// comments. write_market() emits the canonical form above.
#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "bmlab/core.hpp"

namespace bmlab {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

Market parse_market(std::string_view text);
std::string write_market(const Market& m);

Market read_market_file(const std::filesystem::path& path);
void write_market_file(const std::filesystem::path& path, const Market& m);

}  // namespace bmlab
