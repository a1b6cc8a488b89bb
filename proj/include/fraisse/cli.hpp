#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fraisse {

inline constexpr const char* tool_version = "0.3.0";

enum ExitCode { ExitOk = 0, ExitRefuted = 1, ExitInconclusive = 2, ExitUsage = 3 };

// args excludes the program name.  The report goes to out as one JSON document.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fraisse
