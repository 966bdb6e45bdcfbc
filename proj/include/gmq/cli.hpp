#pragma once

#include <iosfwd>

namespace gmq {

/// Entry point of the `gmq` command line tool. Returns the process exit code:
/// 0 on success, 1 on invalid input or a failed verification, and the CLI
/// parser's code for usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gmq
