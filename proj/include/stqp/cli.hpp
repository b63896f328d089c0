#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stqp::cli {

/// Exit codes: 0 success, 1 usage or domain error, 2 numerical failure.
int dispatch(int argc, char** argv);

/// Same, with argv[0] omitted and explicit streams (for in-process use).
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stqp::cli
