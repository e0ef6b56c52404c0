#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace homoseg::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsageError = 1,
    kIoError = 2,
    kNumericalAbort = 3,
};

/// Runs one subcommand (`gen-data`, `train`, `eval`, `gradcheck`,
/// `compare`, `report`). `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace homoseg::cli
