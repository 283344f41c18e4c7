#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace swarmlab {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitRuntime = 2 };

/// Entry point of the `swarmlab` tool. args excludes the program name.
/// Failures print one line "swarmlab: error kind=<Kind> message=<text>" to `err`.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace swarmlab
