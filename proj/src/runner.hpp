#pragma once

#include "config.hpp"

namespace fracperron {

// Exit codes shared by the runner and the CLI.
enum ExitCode {
    kExitOk = 0,
    kExitConfig = 2,
    kExitNoConvergence = 3,
    kExitResolution = 4,
};

// Executes one experiment: dispatches on the task, writes the declared
// outputs atomically under cfg.out_dir. Throws the module errors; run()
// catches them and translates into exit codes plus an error JSON line on
// stderr.
void execute(const ExperimentConfig& cfg);

// CLI flag overrides applied on top of the parsed config.
struct RunOverrides {
    std::string out_dir;
    std::string task;
    int jobs = 0;
    bool dump_weights = false;
    bool dump_residual = false;
};

int run(const std::string& config_path, const RunOverrides* overrides = nullptr);

// Shortest round-trip decimal formatting used for every CSV cell.
std::string format_double(double v);

}  // namespace fracperron
