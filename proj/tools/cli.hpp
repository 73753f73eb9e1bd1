#pragma once

#include <ostream>

namespace platonic::cli {

enum ExitCode { ok = 0, parse_error = 1, invalid_model = 2, inconsistency = 3, domain_error = 4 };

/// Runs one command; reports go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace platonic::cli
