#pragma once

#include <iosfwd>

namespace sagopt::cli {

// Entry point of the sagopt tool, writing to the given streams instead of the
// process stdout/stderr. Exit codes: 0 success, 1 when every run of the
// experiment diverged or a verification check failed (the table is still
// written), 2 on usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sagopt::cli
