#pragma once

#include <iosfwd>

namespace aqnn::cli {

enum ExitCode : int { ok = 0, usage_error = 1, data_error = 2, degenerate_query = 3 };

/// Entry point of the `aqnn` command line tool; output goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aqnn::cli
