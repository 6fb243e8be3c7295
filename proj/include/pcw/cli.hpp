#pragma once

#include <iosfwd>

namespace pcw {

inline constexpr const char* kVersion = "1.0.0";

// Exit codes: 0 success, 1 usage or configuration error, 2 a computation
// missed its residual or conservation budget.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace pcw
