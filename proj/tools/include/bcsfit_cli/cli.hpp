#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bcsfit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNoConvergence = 3;

inline constexpr int kSchemaVersion = 1;

/// Runs one command. `args` excludes the program name, e.g.
/// {"fit", "--data", "d.csv", "--formula", "y ~ x", "--family", "BCNO"}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bcsfit::cli
