#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace deonnet::cli {

/// Entry point behind the `deonnet` binary. Returns the process exit code:
/// 0 on success, 1 on domain errors (error name on a single stderr line),
/// 2 on parse errors (with line and column).
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace deonnet::cli
