// special.hpp: Spherical Bessel functions and a golden-section maximizer

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace colchain {

// j_0(x) .. j_nmax(x) for x >= 0. Upward recurrence when x exceeds nmax,
// Miller's downward recurrence otherwise, power series near the origin.
std::vector<double> sph_bessel_all(std::size_t nmax, double x);

double sph_bessel(std::size_t n, double x);

struct GoldenResult {
    double x;
    double value;
    bool interior;  // false if the maximum sits on a bracket end
};

// Maximize a unimodal f on [a, b] to absolute tolerance tol in x.
GoldenResult golden_section_max(const std::function<double(double)>& f, double a, double b, double tol = 1e-10);

}  // namespace colchain
