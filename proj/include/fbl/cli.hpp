#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fbl/space.hpp"

namespace fbl::cli {

/// Exit statuses of the command-line front end.
inline constexpr int kOk = 0;
inline constexpr int kValidationFailure = 2;
inline constexpr int kComputationFailure = 3;

/// Descriptor syntax: l1:n, l2:n, linf:n, lp:n:p, wl1:w1,w2,...
Space parse_space(const std::string& text);

/// Runs one command line (args excludes the program name). Reports go to
/// `out` (unless --out is given), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace fbl::cli
