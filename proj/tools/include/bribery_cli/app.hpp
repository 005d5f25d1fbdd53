#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bribery::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;      // engine or I/O failure
inline constexpr int kExitUsage = 2;      // bad command line
inline constexpr int kExitMismatch = 3;   // validate found a metric out of band

// Entry point shared by the executable and the tests. `args` excludes the
// program name. Reports go to `out` (or --out), summaries and error records
// to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bribery::cli
