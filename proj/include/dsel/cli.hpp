#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dsel {

/// Entry point of the `dsel` tool. Returns the process exit code:
/// 0 success, 1 I/O, 2 data/degenerate input, 3 unknown name, 64 usage.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Environment variable that supplies the default --workdir.
inline constexpr const char* workdir_env = "DSEL_WORKDIR";

}  // namespace dsel
