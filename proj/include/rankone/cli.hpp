#pragma once

#include <ostream>
#include <string>

#include "rankone/kernel.hpp"

namespace rankone {

/// Runs one command line (argv[0] is the program name). Returns 0 on pass or
/// an explained not-asserted verdict, 1 on fail, 2 on usage or parameter
/// errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "re,im" or a bare real.
cplx parse_complex(const std::string& s);

}  // namespace rankone
