#pragma once

#include <iosfwd>

namespace simspace {

/// Entry point of the `simspace` executable. Returns the process exit code:
/// 0 on success, 1 on usage or validation errors, 2 on runtime errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace simspace
