/// @file cli.hpp
/// @brief Command-line front end.
///
/// Exit codes: 0 success, 2 invalid configuration, 3 under-resolved or
/// impossible hole geometry, 4 solver non-convergence.
#pragma once

#include <string>
#include <vector>

namespace perfhom::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitGeometry = 3;
inline constexpr int kExitNonConvergence = 4;

int run(int argc, char** argv);

/// Same as run() with args[0] as the program name.
int run(const std::vector<std::string>& args);

} // namespace perfhom::cli
