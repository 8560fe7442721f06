#pragma once

// Command-line driver. Exit codes: 0 pass, 1 fail / inconclusive / error
// status, 2 usage error.

#include <iosfwd>
#include <string>
#include <vector>

namespace qheis::cli {

int run(std::vector<std::string> const &args, std::ostream &out, std::ostream &err);

} // namespace qheis::cli
