// analysis.hpp: Collision-model error against a reference, sampling bound, regime fits

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "colchain/models.hpp"

namespace colchain {

// Upper bound on the single-step sampling error for an Ohmic bath:
// 0 for dt <= pi/wc, else 2 pi^2 alpha ((wc dt / pi)^2 - 1).
double sampling_bound(double alpha, double omega_c, double dt);

// Difference between exact and sampled bath correlation functions,
//     int_{pi/dt}^{wc} 2 alpha w exp(-i w tau) dw,
// in closed form, with a series near tau = 0 (limit alpha (wc^2 - pi^2/dt^2)). Zero for dt <= pi/wc.
std::complex<double> delta_C(double alpha, double omega_c, double dt, double tau);

// Same integral by adaptive quadrature; used as an oracle.
std::complex<double> delta_C_quadrature(double alpha, double omega_c, double dt, double tau);

struct ErrorMetrics {
    double avg_error{0.0};     // time-mean |series - reference|
    double steady_error{0.0};  // |mean over last 10% (series) - same (reference)|
};

// Reference linearly interpolated onto the series times inside the common range.
ErrorMetrics error_metrics(const TimeSeries& series, const TimeSeries& reference);

struct RegimeFitOptions {
    // Errors at or above (1 - saturation_margin) * plateau are excluded; <= 0 disables.
    double plateau{0.0};
    double saturation_margin{0.05};
    std::size_t min_points{3};
    // Slope difference below which the data are reported as a single regime.
    double single_regime_tol{0.25};
};

struct RegimeFit {
    double slope_below{0.0};
    double slope_above{0.0};
    double intercept_below{0.0};  // log10 prefactors
    double intercept_above{0.0};
    double threshold_dt{0.0};
    bool threshold_found{false};
    bool single_regime{false};
    bool degenerate{false};
    std::vector<bool> used;  // per input point, after saturation exclusion
};

// Two-segment least squares in log-log space. The breakpoint is a grid point shared by
// both segments and is chosen to minimize the summed residual; each segment needs
// min_points points.
RegimeFit fit_regimes(std::span<const double> dt_values, std::span<const double> errors,
                      const RegimeFitOptions& opts = {});

struct ErrorReport {
    std::vector<double> dt_values;
    std::vector<double> avg_errors;
    std::vector<double> steady_errors;
    std::vector<double> bound_values;
    double plateau{0.0};
    RegimeFit fit;
    RegimeFit steady_fit;
};

// Saturation plateau: error of the unrelaxed trajectory (sigma_z = 1) against the reference.
double saturation_plateau(const TimeSeries& reference);

ErrorReport analyze(std::span<const TimeSeries> runs, const TimeSeries& reference, double alpha, double omega_c);

// Planted two-regime data: c dt^p_below up to the threshold, continuous c' dt^p_above after,
// multiplied by log-normal noise of relative size `noise`.
std::vector<double> synthetic_errors(std::span<const double> dt_values, double threshold, double p_below,
                                     double p_above, double noise, std::uint64_t seed);

}  // namespace colchain
