#pragma once

#include "mqj/config.hpp"

#include <iosfwd>

namespace mqj {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,
    kExitNumerical = 2,
    kExitInsufficient = 3,
};

/// Runs the configured experiment, writing artifacts plus the resolved
/// config (config.ini) into config.out. Returns the process exit code.
int run_experiment(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace mqj
