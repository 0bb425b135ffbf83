#include "colchain/special.hpp"

#include <algorithm>

#include "colchain/errors.hpp"

namespace colchain {

namespace {

constexpr double kSeriesLimit = 1e-3;

// x^n / (2n+1)!! * (1 - x^2 / (2(2n+3)))
std::vector<double> series(std::size_t nmax, double x) {
    std::vector<double> out(nmax + 1, 0.0);
    double lead = 1.0;
    for (std::size_t n = 0; n <= nmax; ++n) {
        if (n > 0) lead *= x / (2.0 * static_cast<double>(n) + 1.0);
        out[n] = lead * (1.0 - x * x / (2.0 * (2.0 * static_cast<double>(n) + 3.0)));
    }
    return out;
}

std::vector<double> upward(std::size_t nmax, double x) {
    std::vector<double> out(nmax + 1);
    const double s = std::sin(x);
    const double c = std::cos(x);
    out[0] = s / x;
    if (nmax >= 1) out[1] = s / (x * x) - c / x;
    for (std::size_t k = 1; k < nmax; ++k) {
        out[k + 1] = (2.0 * static_cast<double>(k) + 1.0) / x * out[k] - out[k - 1];
    }
    return out;
}

std::vector<double> miller(std::size_t nmax, double x) {
    const double top = std::max(static_cast<double>(nmax), x);
    const auto start = static_cast<std::size_t>(top + 30.0 + std::sqrt(40.0 * top));
    std::vector<double> out(nmax + 1, 0.0);
    double next = 0.0;
    double cur = 1e-300;
    for (std::size_t k = start; k > 0; --k) {
        const double prev = (2.0 * static_cast<double>(k) + 1.0) / x * cur - next;
        next = cur;
        cur = prev;
        if (k - 1 <= nmax) out[k - 1] = cur;
        if (std::abs(cur) > 1e250) {
            // Rescale everything produced so far to stay in range
            cur *= 1e-250;
            next *= 1e-250;
            for (std::size_t j = k - 1; j <= nmax && j < out.size(); ++j) out[j] *= 1e-250;
        }
    }
    // Normalize against whichever of j_0, j_1 is better conditioned
    const double j0 = std::sin(x) / x;
    const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
    double scale = 0.0;
    if (nmax >= 1 && std::abs(j1) > std::abs(j0)) {
        scale = j1 / out[1];
    } else {
        scale = j0 / out[0];
    }
    if (!std::isfinite(scale)) throw NumericalError("spherical Bessel recurrence failed to converge", scale);
    for (double& v : out) v *= scale;
    return out;
}

}  // namespace

std::vector<double> sph_bessel_all(std::size_t nmax, double x) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("spherical Bessel argument must be finite and >= 0");
    if (x < kSeriesLimit) return series(nmax, x);
    if (x > static_cast<double>(nmax)) return upward(nmax, x);
    return miller(nmax, x);
}

double sph_bessel(std::size_t n, double x) { return sph_bessel_all(n, x)[n]; }

GoldenResult golden_section_max(const std::function<double(double)>& f, double a, double b, double tol) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = a;
    double hi = b;
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = f(x1);
        }
    }
    const double x = 0.5 * (lo + hi);
    const double edge = 4.0 * tol;
    return {x, f(x), (x - a) > edge && (b - x) > edge};
}

}  // namespace colchain
