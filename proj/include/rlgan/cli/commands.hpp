#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rlgan::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

// args excludes the program name. Usage and config errors return 1, runtime
// failures 2.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rlgan::cli
