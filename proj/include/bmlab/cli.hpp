#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bmlab {

/// Entry point of the `bmlab` tool: simulate, trace, enumerate,
/// best-response, fit. Returns the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bmlab
