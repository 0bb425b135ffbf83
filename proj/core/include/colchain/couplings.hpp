// couplings.hpp: Time-dependent system/chain-mode couplings gamma_n(t)
//
// Flat-measure polynomials are the orthonormal shifted Legendre polynomials in
// x = w/wc, so that
//     gamma_n^M(t) = g * integral_0^wc P_n(w/wc) exp(-i w t) dw
//                  = (-i)^n sqrt(2n+1) g wc exp(-i theta) j_n(theta),   theta = wc t / 2.
// Direct quadrature is the ground truth every closed form is checked against.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "colchain/orthopoly.hpp"
#include "colchain/specdens.hpp"

namespace colchain {

using cplx = std::complex<double>;

enum class CouplingMethod { Bessel, Asymptotic, Quadrature, Convolved };
enum class PolyMeasure { OwnMeasure, FlatMeasure };

std::string to_string(CouplingMethod method);
CouplingMethod coupling_method_from_string(const std::string& name);

struct CouplingTrajectory {
    std::size_t n{0};
    std::vector<double> times;
    std::vector<cplx> values;
    CouplingMethod method{CouplingMethod::Bessel};
    double g{1.0};
    double omega_c{1.0};
};

struct MaximaFit {
    std::vector<std::size_t> n_values;
    std::vector<double> t_max;
    double slope{0.0};      // in units of wc * t per mode
    double intercept{0.0};  // in units of wc * t
    bool degenerate{false}; // fewer than two distinct n values
};

// Closed form via spherical Bessel functions; exact for the flat SD. Valid for t of
// either sign (gamma(-t) = conj(gamma(t))).
cplx gamma_flat_bessel(std::size_t n, double t, double g, double omega_c);

// Leading large-argument form, j_n(theta) ~ sin(theta - n pi/2) / theta.
cplx gamma_flat_asymptotic(std::size_t n, double t, double g, double omega_c);

// Direct integration. OwnMeasure: g int P_n(w) exp(-i w t) J(w) dw with P_n orthonormal
// for J. FlatMeasure: g int P_n(w/wc) exp(-i w t) sqrt(J(w)) dw with shifted Legendre P_n.
cplx gamma_quadrature(const SpectralDensity& sd, PolyMeasure measure, std::size_t n, double t,
                      double abs_tol = 1e-12);

// OwnMeasure variant reusing precomputed recurrence coefficients (rc.N > n).
cplx gamma_quadrature(const SpectralDensity& sd, const RecurrenceCoefficients& rc, std::size_t n, double t,
                      double abs_tol = 1e-12);

// Convolution (F[sqrt J] * gamma_n^M)(t) evaluated by the trapezoid rule on a uniform
// grid of spacing pi/(8 wc). The truncated sums are extrapolated in the window length
// to remove the algebraic tails of the hard-cutoff transforms. The overall constant is
// calibrated once against gamma_quadrature(FlatMeasure) at n = 0, t = calibration_t.
class ConvolvedCoupling {
public:
    // window: shortest truncation half-length (default 32 periods 2 pi/wc);
    // calibration_t defaults to pi/wc.
    explicit ConvolvedCoupling(const SpectralDensity& sd, double window = 0.0, double calibration_t = -1.0);

    cplx operator()(std::size_t n, double t) const;

    double constant() const noexcept { return constant_; }
    double grid_step() const noexcept { return h_; }
    double window() const noexcept { return window_; }

private:
    cplx raw(std::size_t n, double t) const;
    cplx truncated_sum(std::size_t n, double t, std::size_t k_max) const;

    SpectralDensity sd_;
    double h_{0.0};
    double window_{0.0};
    double constant_{1.0};
    std::vector<cplx> kernel_;  // F[sqrt J](k h) for k = -K..K, offset K
    std::size_t K_{0};
};

// One-shot convenience wrapper around ConvolvedCoupling.
cplx gamma_convolved(const SpectralDensity& sd, std::size_t n, double t);

CouplingTrajectory coupling_trajectory(const SpectralDensity& sd, CouplingMethod method, std::size_t n,
                                       std::span<const double> times);

// Maxima of |gamma_n^M(t)| by golden-section search on [2n/wc, 2(n + 2 + (n+1)^(1/3))/wc] (widened once
// if the maximum lands on the bracket edge), then a least-squares line of wc t_n vs n.
MaximaFit find_coupling_maxima(std::span<const std::size_t> n_values, double g, double omega_c);

struct HeatmapPoint {
    std::size_t n;
    double t;
    double magnitude;
};

// |gamma_n^M(t)| over an (n, t) grid.
std::vector<HeatmapPoint> coupling_heatmap(std::size_t n_max, std::span<const double> times, double g,
                                           double omega_c);

}  // namespace colchain
