// commands.hpp: Subcommands of the colchain tool. Each writes into cfg.output_dir and
// returns a process exit code.

#pragma once

#include "colchain_cli/run_config.hpp"

namespace colchain::cli {

enum ExitCode : int {
    kOk = 0,
    kConfigFailure = 1,
    kRuntimeFailure = 2,
    kPartialFailure = 3,
};

int cmd_chain_coeffs(const RunConfig& cfg);
int cmd_couplings(const RunConfig& cfg);
int cmd_kernel(const RunConfig& cfg);
int cmd_simulate(const RunConfig& cfg);
int cmd_sweep(const RunConfig& cfg);
int cmd_analyze(const RunConfig& cfg);

}  // namespace colchain::cli
