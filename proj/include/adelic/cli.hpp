#pragma once

// Batch front end. Commands read flags (or a JSON config file given with
// --config, which flags override), write CSV/JSON artifacts and print either
// a headline value or the CSV table. Failures exit with status 2 and a JSON
// error object on stderr.

#include <ostream>
#include <string>
#include <vector>

namespace adelic {

/// args excludes the program name; args[0] is the command.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Names of the available commands.
std::vector<std::string> cli_commands();

}  // namespace adelic
