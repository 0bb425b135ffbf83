#include "colchain/couplings.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Dense>

#include "colchain/errors.hpp"
#include "colchain/quadrature.hpp"
#include "colchain/special.hpp"

namespace colchain {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// (-i)^n
cplx minus_i_pow(std::size_t n) {
    switch (n % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, -1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, 1.0};
    }
}

// Orthonormal P_n(w) for the measure behind rc
double own_measure_poly(const RecurrenceCoefficients& rc, std::size_t n, double w) {
    double p_prev = 0.0;
    double p = 1.0 / rc.norm_p0;
    for (std::size_t k = 0; k < n; ++k) {
        const double next = (rc.C[k] * w - rc.A[k]) * p + rc.B[k] * p_prev;
        p_prev = p;
        p = next;
    }
    return p;
}

quad::Options quad_options(const SpectralDensity& sd, double t, double abs_tol) {
    quad::Options opts;
    opts.abs_tol = abs_tol * std::max(1.0, std::abs(sd.g()) * sd.omega_c());
    opts.frequency = t;
    opts.max_intervals = 20000;
    return opts;
}

}  // namespace

std::string to_string(CouplingMethod method) {
    switch (method) {
        case CouplingMethod::Bessel: return "bessel";
        case CouplingMethod::Asymptotic: return "asymptotic";
        case CouplingMethod::Quadrature: return "quadrature";
        case CouplingMethod::Convolved: return "convolved";
    }
    return "unknown";
}

CouplingMethod coupling_method_from_string(const std::string& name) {
    if (name == "bessel") return CouplingMethod::Bessel;
    if (name == "asymptotic") return CouplingMethod::Asymptotic;
    if (name == "quadrature") return CouplingMethod::Quadrature;
    if (name == "convolved") return CouplingMethod::Convolved;
    throw ConfigError("unknown coupling method '" + name + "'");
}

cplx gamma_flat_bessel(std::size_t n, double t, double g, double omega_c) {
    if (!std::isfinite(t)) throw ConfigError("coupling evaluated at a non-finite time");
    if (t < 0.0) return std::conj(gamma_flat_bessel(n, -t, g, omega_c));
    const double theta = 0.5 * omega_c * t;
    const double jn = sph_bessel(n, theta);
    return minus_i_pow(n) * std::sqrt(2.0 * static_cast<double>(n) + 1.0) * g * omega_c *
           std::polar(jn, -theta);
}

cplx gamma_flat_asymptotic(std::size_t n, double t, double g, double omega_c) {
    if (!std::isfinite(t)) throw ConfigError("coupling evaluated at a non-finite time");
    if (t == 0.0) throw ConfigError("asymptotic coupling form is singular at t = 0");
    if (t < 0.0) return std::conj(gamma_flat_asymptotic(n, -t, g, omega_c));
    const double theta = 0.5 * omega_c * t;
    const double jn = std::sin(theta - 0.5 * M_PI * static_cast<double>(n)) / theta;
    return minus_i_pow(n) * std::sqrt(2.0 * static_cast<double>(n) + 1.0) * g * omega_c *
           std::polar(jn, -theta);
}

cplx gamma_quadrature(const SpectralDensity& sd, const RecurrenceCoefficients& rc, std::size_t n, double t,
                      double abs_tol) {
    if (rc.N < n) throw ConfigError("recurrence coefficients do not reach the requested mode");
    const auto breaks = sd.breakpoints();
    auto integrand = [&](double w) {
        return own_measure_poly(rc, n, w) * evaluate(sd, w) * std::polar(1.0, -w * t);
    };
    return sd.g() * quad::integrate<cplx>(integrand, breaks, quad_options(sd, t, abs_tol)).value;
}

cplx gamma_quadrature(const SpectralDensity& sd, PolyMeasure measure, std::size_t n, double t, double abs_tol) {
    if (!std::isfinite(t)) throw ConfigError("coupling evaluated at a non-finite time");
    if (measure == PolyMeasure::OwnMeasure) {
        const auto rc = stieltjes_recurrence(sd, n + 1, std::max<std::size_t>(kDefaultQuadPoints, 4 * (n + 1)));
        return gamma_quadrature(sd, rc, n, t, abs_tol);
    }
    const double wc = sd.omega_c();
    const auto breaks = sd.breakpoints();
    auto integrand = [&](double w) {
        return shifted_legendre(n, w / wc) * std::sqrt(evaluate(sd, w)) * std::polar(1.0, -w * t);
    };
    return sd.g() * quad::integrate<cplx>(integrand, breaks, quad_options(sd, t, abs_tol)).value;
}

// Window lengths L, 2L, 4L, 8L, 16L; tail exponents 1, 1.5, 2, 2.5 are eliminated.
namespace {
constexpr std::size_t kLevels = 5;
constexpr std::array<double, kLevels - 1> kTailExponents = {1.0, 1.5, 2.0, 2.5};
}  // namespace

ConvolvedCoupling::ConvolvedCoupling(const SpectralDensity& sd, double window, double calibration_t) : sd_(sd) {
    const double wc = sd.omega_c();
    h_ = M_PI / (8.0 * wc);
    const double period = kTwoPi / wc;
    if (!(window > 0.0)) window = 16.0 * period;
    const auto periods = static_cast<std::size_t>(std::ceil(window / period - 1e-12));
    K_ = 16 * periods;  // 16 grid steps per period
    window_ = static_cast<double>(K_) * h_;

    const std::size_t k_max = K_ << (kLevels - 1);
    kernel_.assign(2 * k_max + 1, cplx{});
    kernel_[k_max] = fourier_sqrt_J(sd, 0.0);
    for (std::size_t k = 1; k <= k_max; ++k) {
        const cplx f = fourier_sqrt_J(sd, static_cast<double>(k) * h_);
        kernel_[k_max + k] = f;
        kernel_[k_max - k] = std::conj(f);
    }

    if (!(calibration_t >= 0.0)) calibration_t = M_PI / wc;
    const cplx truth = gamma_quadrature(sd, PolyMeasure::FlatMeasure, 0, calibration_t);
    const cplx r = raw(0, calibration_t);
    if (std::abs(r) == 0.0) throw NumericalError("convolution vanishes at the calibration point", 0.0);
    constant_ = (truth / r).real();
}

cplx ConvolvedCoupling::raw(std::size_t n, double t) const {
    // Partial trapezoid sums at each window length, accumulated in one pass
    const std::size_t k_max = K_ << (kLevels - 1);
    std::array<cplx, kLevels> sums{};
    const double g = sd_.g();
    const double wc = sd_.omega_c();
    for (std::size_t idx = 0; idx < kernel_.size(); ++idx) {
        const auto k = static_cast<long long>(idx) - static_cast<long long>(k_max);
        const std::size_t ak = static_cast<std::size_t>(std::llabs(k));
        const cplx term = kernel_[idx] * gamma_flat_bessel(n, t - static_cast<double>(k) * h_, 1.0, wc);
        for (std::size_t lvl = 0; lvl < kLevels; ++lvl) {
            const std::size_t K = K_ << lvl;
            if (ak < K) {
                sums[lvl] += term;
            } else if (ak == K) {
                sums[lvl] += 0.5 * term;
            }
        }
    }
    // Fit S(L) = S_inf + sum_j c_j L^-p_j through the levels
    Eigen::Matrix<double, kLevels, kLevels> A;
    Eigen::Matrix<cplx, kLevels, 1> rhs;
    for (std::size_t lvl = 0; lvl < kLevels; ++lvl) {
        const double L = static_cast<double>(K_ << lvl) * h_;
        A(static_cast<Eigen::Index>(lvl), 0) = 1.0;
        for (std::size_t j = 0; j + 1 < kLevels; ++j) {
            A(static_cast<Eigen::Index>(lvl), static_cast<Eigen::Index>(j + 1)) = std::pow(L, -kTailExponents[j]);
        }
        rhs(static_cast<Eigen::Index>(lvl)) = h_ * g * sums[lvl];
    }
    const Eigen::Matrix<cplx, kLevels, 1> coeff = A.cast<cplx>().fullPivLu().solve(rhs);
    return coeff(0);
}

cplx ConvolvedCoupling::operator()(std::size_t n, double t) const { return constant_ * raw(n, t); }

cplx gamma_convolved(const SpectralDensity& sd, std::size_t n, double t) {
    return ConvolvedCoupling(sd)(n, t);
}

CouplingTrajectory coupling_trajectory(const SpectralDensity& sd, CouplingMethod method, std::size_t n,
                                       std::span<const double> times) {
    CouplingTrajectory traj;
    traj.n = n;
    traj.method = method;
    traj.g = sd.g();
    traj.omega_c = sd.omega_c();
    traj.times.assign(times.begin(), times.end());
    traj.values.reserve(times.size());
    switch (method) {
        case CouplingMethod::Bessel:
            for (double t : times) traj.values.push_back(gamma_flat_bessel(n, t, sd.g(), sd.omega_c()));
            break;
        case CouplingMethod::Asymptotic:
            for (double t : times) traj.values.push_back(gamma_flat_asymptotic(n, t, sd.g(), sd.omega_c()));
            break;
        case CouplingMethod::Quadrature:
            for (double t : times) traj.values.push_back(gamma_quadrature(sd, PolyMeasure::FlatMeasure, n, t));
            break;
        case CouplingMethod::Convolved: {
            const ConvolvedCoupling conv(sd);
            for (double t : times) traj.values.push_back(conv(n, t));
            break;
        }
    }
    return traj;
}

MaximaFit find_coupling_maxima(std::span<const std::size_t> n_values, double g, double omega_c) {
    if (n_values.empty()) throw ConfigError("maxima search needs at least one mode index");
    if (!(omega_c > 0.0)) throw ConfigError("cutoff must be positive");
    MaximaFit fit;
    for (std::size_t n : n_values) {
        double t_max = 0.0;
        if (n > 0) {
            auto f = [&](double t) { return std::abs(gamma_flat_bessel(n, t, g, omega_c)); };
            // first maximum of j_n sits near n + 0.81 n^(1/3), below its first zero
            const double nd = static_cast<double>(n);
            const double lo = 2.0 * nd / omega_c;
            const double hi = 2.0 * (nd + 2.0 + std::cbrt(nd + 1.0)) / omega_c;
            const double tol = 1e-10 / omega_c;
            auto res = golden_section_max(f, lo, hi, tol);
            if (!res.interior) {
                res = golden_section_max(f, lo, hi + 2.0 / omega_c, tol);
                if (!res.interior) {
                    throw NumericalError("coupling maximum not bracketed for mode " + std::to_string(n), res.x);
                }
            }
            t_max = res.x;
        }
        fit.n_values.push_back(n);
        fit.t_max.push_back(t_max);
    }

    std::vector<std::size_t> distinct(fit.n_values);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2) {
        fit.degenerate = true;
        fit.slope = std::nan("");
        fit.intercept = std::nan("");
        return fit;
    }
    const double m = static_cast<double>(fit.n_values.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < fit.n_values.size(); ++i) {
        const double x = static_cast<double>(fit.n_values[i]);
        const double y = omega_c * fit.t_max[i];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / m;
    return fit;
}

std::vector<HeatmapPoint> coupling_heatmap(std::size_t n_max, std::span<const double> times, double g,
                                           double omega_c) {
    std::vector<HeatmapPoint> out;
    out.reserve((n_max + 1) * times.size());
    for (double t : times) {
        const double theta = 0.5 * omega_c * std::abs(t);
        const auto j = sph_bessel_all(n_max, theta);
        for (std::size_t n = 0; n <= n_max; ++n) {
            const double mag = std::sqrt(2.0 * static_cast<double>(n) + 1.0) * std::abs(g) * omega_c * std::abs(j[n]);
            out.push_back({n, t, mag});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const HeatmapPoint& a, const HeatmapPoint& b) { return a.n < b.n; });
    return out;
}

}  // namespace colchain
