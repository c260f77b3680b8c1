#pragma once

#include "landau/cli/config.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace landau::cli {

enum ExitCode : int { exit_ok = 0, exit_error = 1, exit_inconclusive = 2 };

struct RunOptions {
    std::string out_dir;  // overrides output.directory when set
    int threads = 0;      // 0: leave the OpenMP default
    std::uint64_t seed = 0;
};

// Runs one of penrose, linear, nonlinear, echo, norms, report and writes
// config.ini, <command>.json and the CSV/snapshot files into the output
// directory. Computation errors propagate as exceptions.
int run_command(const std::string& command, const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& log);

}  // namespace landau::cli
