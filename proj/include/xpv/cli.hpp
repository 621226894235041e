#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xpv {

inline constexpr const char* kVersion = "1.0.0";

// Exit codes: 0 all checks pass, 1 a check failed or was indeterminate,
// 2 usage, precondition or other error (message on err).
// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace xpv
