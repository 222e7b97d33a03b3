#pragma once

namespace resact::cli {

enum ExitCode : int {
    kOk = 0,
    kInvalidInput = 2,
    kNumericalFailure = 3,
    kIoFailure = 4,
    kNoImprovement = 5,
};

/// Subcommand dispatcher behind the resact binary.
int run_cli(int argc, char** argv);

}  // namespace resact::cli
