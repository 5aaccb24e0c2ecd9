#pragma once

#include <iosfwd>

namespace sparsemt::cli {

/// Runs the command line front end. Returns the process exit code:
/// 0 on success, 1 for domain errors and unwritable outputs, 2 for bad
/// flags or config documents.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sparsemt::cli
