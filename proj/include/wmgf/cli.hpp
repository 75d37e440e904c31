#pragma once

#include <string>
#include <vector>

namespace wmgf {

/// Multi-command entry point. Exit codes: 0 success, 1 computational
/// failure, 2 usage/input error. Errors are reported as one JSON object
/// per line on stderr.
int run_cli(int argc, const char* const* argv);

/// Convenience overload for in-process invocation; args exclude argv[0].
int run_cli(const std::vector<std::string>& args);

} // namespace wmgf
