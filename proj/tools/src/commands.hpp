#pragma once

#include <iosfwd>

namespace rwcscope::cli {

/// Entry point shared by the executable and the tests. Returns the process
/// exit status; diagnostics go to `err` as "error: <ErrorName>: <message>".
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rwcscope::cli
