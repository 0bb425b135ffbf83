// run_config.hpp: JSON run configuration for the colchain command-line tool

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "colchain/couplings.hpp"
#include "colchain/models.hpp"
#include "colchain/specdens.hpp"

namespace colchain::cli {

inline constexpr int kSchemaVersion = 1;

struct SpectralConfig {
    // Empty kind follows the model bath (ohmic or flat)
    std::string kind;
    std::string file;  // tabulated only
};

struct ChainConfig {
    std::size_t n_modes{30};
    std::size_t quad_points{kDefaultQuadPoints};
    std::string method{"stieltjes"};  // or "lanczos"
};

struct CouplingsConfig {
    std::size_t n_max{40};
    double t_max{60.0};
    double t_step{0.1};
    CouplingMethod method{CouplingMethod::Bessel};
    std::size_t fit_n_min{2};
    std::size_t fit_n_max{40};
};

struct KernelConfig {
    std::size_t steps{20};
    KernelVariant variant{KernelVariant::Chain};
};

struct SyntheticConfig {
    bool enabled{false};
    double threshold{2.0};
    double p_below{2.5};
    double p_above{2.0};
    double noise{0.02};
};

struct SweepConfig {
    std::vector<double> dt_values{0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0};
    double reference_dt{0.1};
    std::size_t reference_max_bond{32};
    SyntheticConfig synthetic;
};

struct AnalyzeRun {
    double dt{0.0};
    std::string file;
};

struct AnalyzeConfig {
    std::string reference;          // CSV of the reference trajectory
    std::vector<AnalyzeRun> runs;   // collision trajectories
};

struct RunConfig {
    int schema_version{kSchemaVersion};
    SpinBosonConfig model;
    SpectralConfig spectral;
    ChainConfig chain;
    CouplingsConfig couplings;
    KernelConfig kernel;
    SweepConfig sweep;
    AnalyzeConfig analyze;
    std::string output_dir{"out"};
    std::uint64_t seed{0};
    std::size_t jobs{1};

    void validate() const;
};

// Missing keys keep their defaults; unknown keys are rejected.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

// Complete echo with every default filled in; parse_config(to_json(c)) == c.
nlohmann::json to_json(const RunConfig& c);

// Spectral density selected by the configuration (tabulated files resolved as given).
SpectralDensity spectral_density(const RunConfig& c);

}  // namespace colchain::cli
