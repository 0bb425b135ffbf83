// colchain: command-line front end: chain-coeffs, couplings, kernel, simulate, sweep, analyze

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "colchain/errors.hpp"
#include "colchain_cli/commands.hpp"
#include "colchain_cli/run_config.hpp"

using namespace colchain;
using namespace colchain::cli;

int main(int argc, char** argv) {
    CLI::App app{"colchain: chain mapping and collision model simulations"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand

    std::string config_path;
    std::string out_dir;
    std::size_t jobs = 0;
    long long seed = -1;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (overrides output_dir)");
    app.add_option("--jobs", jobs, "worker threads (overrides jobs)")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "random seed (overrides seed)")->check(CLI::NonNegativeNumber);

    struct Sub {
        const char* name;
        const char* help;
        int (*fn)(const RunConfig&);
    };
    const Sub subs[] = {
        {"chain-coeffs", "chain energies and hoppings (n, epsilon, t, kappa)", cmd_chain_coeffs},
        {"couplings", "|gamma_n(t)| heatmap and maxima fit", cmd_couplings},
        {"kernel", "collision kernel W and ancilla windows", cmd_kernel},
        {"simulate", "one <sigma_z>(t) trajectory", cmd_simulate},
        {"sweep", "reference plus collision runs over dt, then analysis", cmd_sweep},
        {"analyze", "error report from existing trajectories", cmd_analyze},
    };
    for (const auto& s : subs) app.add_subcommand(s.name, s.help);

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = config_path.empty() ? parse_config({{"schema_version", kSchemaVersion}})
                                            : load_config(config_path);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (jobs > 0) cfg.jobs = jobs;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        cfg.validate();
        for (const auto& s : subs) {
            if (app.got_subcommand(s.name)) return s.fn(cfg);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigFailure;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kConfigFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeFailure;
    }
    return kOk;
}
