#pragma once

#include <ostream>
#include <string>

#include "chromatex/error.hpp"

namespace chromatex::cli {

/// Exit codes: 0 on success, the numeric ErrorCode value for library
/// failures (1..14), kUsageExit for bad command lines and kInternalExit for
/// anything unexpected.
inline constexpr int kUsageExit = 64;
inline constexpr int kInternalExit = 70;

int exit_code(ErrorCode code) noexcept;

/// The single machine-parsable failure line written to the error stream:
///   error code=<Name> exit=<n> msg="<escaped message>"
std::string error_line(std::string_view code_name, int exit, std::string_view message);

/// Runs the command line; never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace chromatex::cli
