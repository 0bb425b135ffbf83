// quadrature.hpp: Gauss–Legendre rules and adaptive Gauss–Kronrod integration
//
// The adaptive integrator is a global-subdivision G7/K15 scheme in the spirit
// of QUADPACK's QAG: the interval with the largest error estimate is bisected
// until the summed estimate drops below the requested tolerance.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

#include "colchain/errors.hpp"

namespace colchain::quad {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point Gauss–Legendre rule on [-1, 1] (Newton iteration on P_n).
Rule gauss_legendre(std::size_t n);

// n-point Gauss–Legendre rule mapped to [a, b].
Rule gauss_legendre(std::size_t n, double a, double b);

// Composite rule: `per_panel` Gauss points on each panel between consecutive breakpoints.
Rule composite_gauss_legendre(std::span<const double> breakpoints, std::size_t per_panel);

struct Options {
    double abs_tol{1e-10};
    double rel_tol{0.0};
    std::size_t max_intervals{4000};
    // Oscillation frequency of the integrand (e.g. tau in exp(-i w tau)); when
    // nonzero the domain is pre-split into panels of length pi/|frequency|.
    double frequency{0.0};
};

template <typename T>
struct Result {
    T value{};
    double error{0.0};
    std::size_t intervals{0};
};

namespace detail {

// Kronrod 15-point abscissae / weights and embedded Gauss 7-point weights.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <typename T>
struct Panel {
    double a;
    double b;
    T value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <typename T, typename F>
Panel<T> gk15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const T fc = f(center);
    T kronrod = fc * kWgk[7];
    T gauss = fc * kWg[3];
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const T f1 = f(center - dx);
        const T f2 = f(center + dx);
        kronrod += (f1 + f2) * kWgk[j];
        if (j % 2 == 1) gauss += (f1 + f2) * kWg[j / 2];
    }
    kronrod *= half;
    gauss *= half;
    double err = magnitude(kronrod - gauss);
    // QUADPACK-style pessimistic rescaling of the raw difference
    if (err > 0.0) {
        const double scaled = 200.0 * err;
        err = std::min(err, scaled * std::sqrt(scaled));
        err = std::max(err, magnitude(kronrod) * 50.0 * 2.22e-16);
    }
    return {a, b, kronrod, err};
}

}  // namespace detail

// Adaptive integral of f over [a, b]. T is double or std::complex<double>.
// Throws NumericalError if the tolerance cannot be met within max_intervals.
template <typename T, typename F>
Result<T> integrate(F&& f, double a, double b, const Options& opts = {}) {
    Result<T> out;
    if (a == b) return out;
    const double sign = b > a ? 1.0 : -1.0;
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);

    std::size_t panels = 1;
    if (opts.frequency != 0.0) {
        const double period = M_PI / std::abs(opts.frequency);
        panels = static_cast<std::size_t>(std::ceil((hi - lo) / period));
        panels = std::clamp<std::size_t>(panels, 1, opts.max_intervals / 2 + 1);
    }

    std::priority_queue<detail::Panel<T>> heap;
    T total{};
    double total_err = 0.0;
    const double width = (hi - lo) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double pa = lo + width * static_cast<double>(p);
        const double pb = (p + 1 == panels) ? hi : pa + width;
        auto panel = detail::gk15<T>(f, pa, pb);
        total += panel.value;
        total_err += panel.error;
        heap.push(panel);
    }

    auto tolerance = [&]() { return std::max(opts.abs_tol, opts.rel_tol * detail::magnitude(total)); };

    while (total_err > tolerance()) {
        if (heap.size() >= opts.max_intervals) {
            throw NumericalError("adaptive quadrature did not converge", total_err);
        }
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw NumericalError("adaptive quadrature hit floating-point resolution", total_err);
        }
        auto left = detail::gk15<T>(f, worst.a, mid);
        auto right = detail::gk15<T>(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to shed the round-off accumulated by incremental updates
    T resum{};
    double err_sum = 0.0;
    out.intervals = heap.size();
    while (!heap.empty()) {
        resum += heap.top().value;
        err_sum += heap.top().error;
        heap.pop();
    }
    out.value = resum * sign;
    out.error = err_sum;
    return out;
}

// Integral over consecutive panels [breaks[i], breaks[i+1]], each handled adaptively
// with an equal share of the absolute tolerance.
template <typename T, typename F>
Result<T> integrate(F&& f, std::span<const double> breaks, const Options& opts = {}) {
    Result<T> out;
    if (breaks.size() < 2) return out;
    Options sub = opts;
    sub.abs_tol = opts.abs_tol / static_cast<double>(breaks.size() - 1);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        auto part = integrate<T>(f, breaks[i], breaks[i + 1], sub);
        out.value += part.value;
        out.error += part.error;
        out.intervals += part.intervals;
    }
    return out;
}

}  // namespace colchain::quad
