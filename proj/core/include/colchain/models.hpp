// models.hpp: Spin Boson Model runners: TEDOPA chain, non-Markovian and Markovian collision models
//
// H_S = (w0/2) sigma_z + delta sigma_x, A_S = sigma_x, initial state spin-up (x) vacuum.
// Spin basis: index 0 = up.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "colchain/collision.hpp"
#include "colchain/mps.hpp"
#include "colchain/specdens.hpp"

namespace colchain {

enum class Representation { Tedopa, CollisionNonMarkovian, CollisionMarkovian };
enum class BathKind { Ohmic, Flat };
// Threshold: ancillae inside the relative-threshold window of each kernel row.
// Diagonal: only the largest entry of each row (one ancilla per step).
enum class WindowMode { Threshold, Diagonal };

std::string to_string(Representation r);
Representation representation_from_string(const std::string& name);
std::string to_string(BathKind b);
BathKind bath_kind_from_string(const std::string& name);
std::string to_string(WindowMode w);
WindowMode window_mode_from_string(const std::string& name);

struct SpinBosonConfig {
    double omega_0{0.2};
    double delta{0.0};
    double alpha{0.1};
    double omega_c{1.0};
    double g{1.0};
    std::size_t n_modes{16};
    std::size_t local_dim{6};
    TruncationPolicy policy{};
    double dt{0.05};
    double horizon{35.0};
    Representation representation{Representation::Tedopa};
    BathKind bath{BathKind::Ohmic};
    double window_threshold{kDefaultWindowThreshold};
    WindowMode window_mode{WindowMode::Threshold};
    KernelVariant kernel{KernelVariant::Chain};
    // Modes outside [0, horizon] kept on each side, in horizons, folded into tail modes
    double tail_length{40.0};
    double tail_tolerance{1e-6};

    void validate() const;
};

// Bath of the configuration. Ohmic: J = 2 alpha w on [0, wc] with scale g.
// Flat: J = 2 alpha wc on [0, wc], carried as a unit flat density with scale g sqrt(2 alpha wc).
SpectralDensity bath_density(const SpinBosonConfig& cfg);

struct TimeSeries {
    std::vector<double> times;
    std::vector<double> values;            // <sigma_z>(t)
    std::vector<double> discarded_weight;  // cumulative
    std::vector<std::size_t> max_bond;     // largest bond dimension of the state so far
    SpinBosonConfig config;
    std::vector<std::string> warnings;
    std::size_t ancillae{0};               // bath sites in the simulation
};

// Second-order symmetric-sweep TEBD on the chain {spin, b_0, ..., b_{N-1}}.
TimeSeries run_tedopa(const SpinBosonConfig& cfg);

// Interaction-picture collision model with the chain-derived kernel at the configured dt.
TimeSeries run_collision_nonmarkovian(const SpinBosonConfig& cfg);

// One fresh ancilla per step, generator H_S + sigma_x sqrt(2 pi) g_flat / sqrt(dt) (a + a^dag).
TimeSeries run_collision_markovian(const SpinBosonConfig& cfg);

TimeSeries run(const SpinBosonConfig& cfg);

// Number of collision steps covering the horizon.
std::size_t collision_steps(const SpinBosonConfig& cfg);

// Local operators
CMatrix sigma_x();
CMatrix sigma_z();
CMatrix annihilation(std::size_t d);

}  // namespace colchain
