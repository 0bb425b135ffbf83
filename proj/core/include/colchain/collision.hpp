// collision.hpp: Collision kernels W built from the time-binned transform of sqrt(J)
//
// Chain-derived kernel, step m (time bin [m dt, (m+1) dt]) and ancilla n:
//     W[m][n] = (g / sqrt(dt)) * integral_{m dt}^{(m+1) dt} F[sqrt J](t' - t_n) dt'
// with mode times t_n = (n + offset) * spacing. When spacing == dt the entries act
// directly on unit-normalized bosonic ancillae: the band-limited shifts
// sqrt(spacing) F[sqrt J](t - t_n) reproduce the bath correlation exactly for
// spacing <= 2 pi / wc.
//
// Time-bin kernel (bin-averaged transform, steps x steps):
//     W[n][m] = (g / dt^(3/2)) * int_{bin n} dt int_{bin m} dt' F[sqrt J](t - t')

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "colchain/specdens.hpp"

namespace colchain {

enum class KernelVariant { Chain, TimeBin };

std::string to_string(KernelVariant v);
KernelVariant kernel_variant_from_string(const std::string& name);

struct AncillaRange {
    std::size_t first{0};
    std::size_t last{0};  // inclusive
    std::size_t width() const noexcept { return last - first + 1; }
};

inline constexpr double kDefaultWindowThreshold = 1e-2;

struct CollisionKernel {
    KernelVariant variant{KernelVariant::Chain};
    double dt{0.0};
    double mode_spacing{0.0};
    double mode_offset{0.0};
    long first_mode{0};  // ancilla column j carries mode index first_mode + j
    Eigen::MatrixXcd W;  // steps x ancillae
    double g{1.0};
    double omega_c{1.0};
    std::vector<AncillaRange> window;

    std::size_t steps() const noexcept { return static_cast<std::size_t>(W.rows()); }
    std::size_t ancillae() const noexcept { return static_cast<std::size_t>(W.cols()); }
};

struct ChainKernelOptions {
    double mode_spacing{0.0};   // <= 0 selects pi / wc
    double mode_offset{0.0};    // in units of mode_spacing
    long first_mode{0};         // may be negative to include modes peaked before t = 0
    double window_threshold{kDefaultWindowThreshold};
};

CollisionKernel kernel_chain(const SpectralDensity& sd, double dt, std::size_t steps, std::size_t ancillae,
                             const ChainKernelOptions& opts = {});

CollisionKernel kernel_timebin(const SpectralDensity& sd, double dt, std::size_t steps,
                               double window_threshold = kDefaultWindowThreshold);

// Steps 0..steps-1 against bins first_bin .. first_bin + bins - 1 (bins may lie outside [0, steps)).
CollisionKernel kernel_timebin(const SpectralDensity& sd, double dt, std::size_t steps, std::size_t bins,
                               long first_bin, double window_threshold = kDefaultWindowThreshold);

// Per row: the contiguous hull of columns with |W| >= rel_threshold * max |W| in that row.
std::vector<AncillaRange> ancilla_window(const CollisionKernel& kernel, double rel_threshold);

}  // namespace colchain
