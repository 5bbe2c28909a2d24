#pragma once

#include <iosfwd>

namespace isodist {

// Entry point behind the `isodist` executable. Returns the process exit
// code: 0 on success, 1 for data or runtime errors, 2 for usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace isodist
