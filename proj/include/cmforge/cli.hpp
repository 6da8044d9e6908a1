#pragma once

#include <iosfwd>

namespace cmforge {

// Exit codes: 0 success, 2 invalid parameters, 3 precision exhausted, 4 internal failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cmforge
