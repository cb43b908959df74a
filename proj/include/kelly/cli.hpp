#pragma once

#include <iosfwd>

namespace kelly::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitNoSolution = 3;

/// Entry point of the `kellymkt` tool. Writes records to `out` and
/// diagnostics to `err`; never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kelly::cli
