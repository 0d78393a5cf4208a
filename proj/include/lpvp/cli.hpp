#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lpvp {

/// Exit codes: 0 success/optimal, 1 usage or IO error, 2 infeasible,
/// 3 certification failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace lpvp
