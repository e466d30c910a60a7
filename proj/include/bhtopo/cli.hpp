#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bhtopo {

/// Entry point of the `bhtopo` command line tool. `args` excludes the program
/// name. Returns the process exit code: 0 on success, 1 when a run or check
/// fails, 2 on a usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bhtopo
