#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace clocksync {

/// Exit codes: 0 success, 1 runtime error, 2 configuration or usage error.
int cli_main(int argc, char** argv);

/// Same, with explicit arguments (program name excluded) and streams.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace clocksync
