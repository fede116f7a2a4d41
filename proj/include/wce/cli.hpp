#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "wce/error.hpp"

namespace wce::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUnexpected = 1;
inline constexpr int kExitUsage = 2;

// 10 + the numeric error code, so every ErrorCode has its own status.
int exit_code(ErrorCode code) noexcept;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wce::cli
