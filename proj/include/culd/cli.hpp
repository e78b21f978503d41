#pragma once

#include <iosfwd>
#include <string>

#include "culd/config.hpp"

namespace culd {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitSimulation = 3,
    kExitIo = 4,
};

// Runs the configured experiment, writes summary.txt and points.csv (plus
// waveform_<case>.csv when requested) under cfg.out_dir, and prints the
// summary to `out`. Errors go to `err`; the return value is an ExitCode.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// One transient simulation of the array described by the config, with its
// waveform written to waveform_transient.csv.
int simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Command-line entry point shared by the culd tool and the tests.
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace culd
