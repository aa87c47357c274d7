#pragma once
#include <iosfwd>
#include <string>
#include <vector>

namespace ebicsel::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int
{
    ok = 0,
    failure = 1,     // runtime error, or a failed `verify` check
    bad_config = 2,  // malformed command line or config file
    io_error = 3,    // unreadable input, unwritable or existing output
};

/// Entry point with injectable streams; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ebicsel::cli
