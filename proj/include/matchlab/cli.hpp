#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace matchlab::cli {

/// Runs the matchlab command line. Exit codes: 0 success (a failing check is
/// still a verdict), 2 schema or usage error, 3 construction assertion
/// failure, 4 profile budget exceeded.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace matchlab::cli
