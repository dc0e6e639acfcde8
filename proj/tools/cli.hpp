#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gravity::cli {

// Runs one subcommand with all output on the given streams, so tests can
// drive the tool in-process. args excludes the program name. Returns the
// process exit status: 0 success, 1 data/estimation failure, 2 usage error.
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

} // namespace gravity::cli
