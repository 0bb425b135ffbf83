// specdens.hpp: Bath spectral densities J(w) and the Fourier kernel F[sqrt J](tau)
//
// Fourier convention used throughout the library:
//     F[f](tau) = (2 pi)^(-1/2) * integral_0^wc f(w) exp(-i w tau) dw
// J vanishes outside [0, wc]. The global coupling scale g is carried by the
// spectral density but never folded into J or F; callers multiply by g.

#pragma once

#include <complex>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace colchain {

enum class SpectralKind { Flat, Ohmic, Tabulated };

std::string to_string(SpectralKind kind);
SpectralKind spectral_kind_from_string(const std::string& name);

struct SpectralSample {
    double omega;
    double value;
};

class SpectralDensity {
public:
    // J(w) = 1 on [0, wc]
    static SpectralDensity flat(double omega_c, double g = 1.0);
    // J(w) = 2 alpha w on [0, wc]
    static SpectralDensity ohmic(double alpha, double omega_c, double g = 1.0);
    // Piecewise-linear through the samples, zero outside them; wc = last omega
    static SpectralDensity tabulated(std::vector<SpectralSample> samples, double g = 1.0);

    SpectralKind kind() const noexcept { return kind_; }
    double omega_c() const noexcept { return omega_c_; }
    double alpha() const noexcept { return alpha_; }
    double g() const noexcept { return g_; }
    const std::vector<SpectralSample>& table() const noexcept { return table_; }

    // Points where J or sqrt(J) may be non-smooth, always including 0 and wc.
    std::vector<double> breakpoints() const;

    // Same density with a different global coupling scale.
    SpectralDensity with_g(double g) const;

private:
    SpectralDensity() = default;

    SpectralKind kind_{SpectralKind::Flat};
    double omega_c_{1.0};
    double alpha_{0.0};
    double g_{1.0};
    std::vector<SpectralSample> table_;
};

// J(w); exactly zero outside [0, wc].
double evaluate(const SpectralDensity& sd, double omega);

// integral_0^wc J(w) dw, analytic for Flat/Ohmic, trapezoid-exact for Tabulated.
double total_weight(const SpectralDensity& sd);

// F[sqrt J](tau). Flat uses the closed form; other kinds use adaptive
// quadrature at absolute tolerance 1e-10.
std::complex<double> fourier_sqrt_J(const SpectralDensity& sd, double tau);

// integral_a^b F[sqrt J](tau) dtau, evaluated as a single frequency integral
//     (2 pi)^(-1/2) int sqrt(J) (exp(-i w a) - exp(-i w b)) / (i w) dw.
std::complex<double> fourier_sqrt_J_integral(const SpectralDensity& sd, double a, double b);

struct FourierKernel {
    std::vector<double> tau_grid;
    std::vector<std::complex<double>> values;
    std::string convention{"F[f](tau) = (2pi)^-1/2 int_0^wc f(w) exp(-i w tau) dw"};
};

FourierKernel fourier_kernel(const SpectralDensity& sd, std::span<const double> taus);

// Two-column CSV (omega, J); optional header row.
SpectralDensity load_tabulated(const std::filesystem::path& path, double g = 1.0);

}  // namespace colchain
