#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace heatlab {

/// Parse and execute one command line (program name excluded). CSV
/// artifacts and reports go to --output when given, otherwise to `out`;
/// diagnostics go to `err`. Returns 0 on success, 1 on input errors
/// (bad flags, bad graphs, file I/O), 2 when a requested tolerance could
/// not be certified.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace heatlab
