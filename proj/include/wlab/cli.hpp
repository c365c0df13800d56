#pragma once

#include <ostream>

namespace wlab {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes: 0 ok, 1 bad input or config, 2 precondition failure, 3 no convergence.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wlab
