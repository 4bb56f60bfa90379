#pragma once

#include <iosfwd>

namespace sonicprint {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `sonicprint` tool. Domain errors print a JSON object
/// {"error": "..."} on err and return 1; usage errors print help text and
/// return 2.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sonicprint
