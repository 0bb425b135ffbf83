#include "colchain/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "colchain/errors.hpp"
#include "colchain/quadrature.hpp"

namespace colchain {

namespace {

using cplx = std::complex<double>;

struct Line {
    double slope{0.0};
    double intercept{0.0};
    double rss{0.0};
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    Line line;
    line.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    line.intercept = my - line.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (line.intercept + line.slope * x[i]);
        line.rss += r * r;
    }
    return line;
}

double interpolate(const std::vector<double>& t, const std::vector<double>& v, double x) {
    auto hi = std::lower_bound(t.begin(), t.end(), x);
    if (hi == t.begin()) return v.front();
    if (hi == t.end()) return v.back();
    const auto i = static_cast<std::size_t>(hi - t.begin());
    const double f = (x - t[i - 1]) / (t[i] - t[i - 1]);
    return v[i - 1] + f * (v[i] - v[i - 1]);
}

double window_mean(const std::vector<double>& t, const std::vector<double>& v, double from, double to) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= from - 1e-12 && t[i] <= to + 1e-12) {
            sum += v[i];
            ++count;
        }
    }
    if (count == 0) return interpolate(t, v, to);
    return sum / static_cast<double>(count);
}

}  // namespace

double sampling_bound(double alpha, double omega_c, double dt) {
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (dt <= M_PI / omega_c) return 0.0;
    const double r = omega_c * dt / M_PI;
    return 2.0 * M_PI * M_PI * alpha * (r * r - 1.0);
}

cplx delta_C(double alpha, double omega_c, double dt, double tau) {
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    const double a = M_PI / dt;
    const double b = omega_c;
    if (a >= b) return 0.0;
    const double scale = std::max(std::abs(a), std::abs(b)) * std::abs(tau);
    if (scale < 1e-3) {
        // 2 alpha int_a^b w exp(-i w tau) dw expanded to fourth order in tau
        const cplx it(0.0, -tau);
        cplx sum = 0.0;
        cplx fac = 1.0;
        double factorial = 1.0;
        for (int k = 0; k <= 4; ++k) {
            if (k > 0) {
                fac *= it;
                factorial *= k;
            }
            const double moment = (std::pow(b, k + 2) - std::pow(a, k + 2)) / (k + 2);
            sum += fac / factorial * moment;
        }
        return 2.0 * alpha * sum;
    }
    auto term = [&](double w) { return std::polar(1.0, -w * tau) * cplx(1.0, w * tau); };
    return 2.0 * alpha / (tau * tau) * (term(b) - term(a));
}

cplx delta_C_quadrature(double alpha, double omega_c, double dt, double tau) {
    const double a = M_PI / dt;
    const double b = omega_c;
    if (a >= b) return 0.0;
    quad::Options opts;
    opts.abs_tol = 1e-13;
    opts.frequency = tau;
    opts.max_intervals = 100000;
    auto f = [&](double w) { return 2.0 * alpha * w * std::polar(1.0, -w * tau); };
    return quad::integrate<cplx>(f, a, b, opts).value;
}

ErrorMetrics error_metrics(const TimeSeries& series, const TimeSeries& reference) {
    if (series.times.empty() || reference.times.empty()) throw ConfigError("empty time series");
    const double lo = std::max(series.times.front(), reference.times.front());
    const double hi = std::min(series.times.back(), reference.times.back());
    if (hi < lo) throw ConfigError("time series cover disjoint ranges");
    ErrorMetrics m;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        const double t = series.times[i];
        if (t < lo - 1e-12 || t > hi + 1e-12) continue;
        sum += std::abs(series.values[i] - interpolate(reference.times, reference.values, t));
        ++count;
    }
    m.avg_error = sum / static_cast<double>(count);
    const double from = hi - 0.1 * (hi - lo);
    m.steady_error = std::abs(window_mean(series.times, series.values, from, hi) -
                              window_mean(reference.times, reference.values, from, hi));
    return m;
}

RegimeFit fit_regimes(std::span<const double> dt_values, std::span<const double> errors, const RegimeFitOptions& opts) {
    if (dt_values.size() != errors.size()) throw ConfigError("dt and error lists differ in length");
    RegimeFit fit;
    fit.used.assign(dt_values.size(), false);

    std::vector<std::size_t> order(dt_values.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dt_values[a] < dt_values[b]; });

    std::vector<double> x, y;
    std::vector<std::size_t> source;
    for (std::size_t idx : order) {
        const double e = errors[idx];
        if (!(e > 0.0) || !(dt_values[idx] > 0.0)) continue;
        if (opts.plateau > 0.0 && e >= (1.0 - opts.saturation_margin) * opts.plateau) continue;
        x.push_back(std::log10(dt_values[idx]));
        y.push_back(std::log10(e));
        source.push_back(idx);
    }
    for (std::size_t idx : source) fit.used[idx] = true;

    const std::size_t n = x.size();
    const std::size_t k = opts.min_points;
    if (n < 2) {
        fit.degenerate = true;
        return fit;
    }
    const Line single = least_squares(x, y);
    if (n < 2 * k - 1) {
        // Too few points for two segments sharing a breakpoint
        fit.degenerate = true;
        fit.single_regime = true;
        fit.slope_below = fit.slope_above = single.slope;
        fit.intercept_below = fit.intercept_above = single.intercept;
        return fit;
    }

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t b = k - 1; b + k <= n; ++b) {
        const std::vector<double> xl(x.begin(), x.begin() + static_cast<long>(b) + 1);
        const std::vector<double> yl(y.begin(), y.begin() + static_cast<long>(b) + 1);
        const std::vector<double> xu(x.begin() + static_cast<long>(b), x.end());
        const std::vector<double> yu(y.begin() + static_cast<long>(b), y.end());
        const Line lower = least_squares(xl, yl);
        const Line upper = least_squares(xu, yu);
        if (lower.rss + upper.rss < best) {
            best = lower.rss + upper.rss;
            fit.slope_below = lower.slope;
            fit.intercept_below = lower.intercept;
            fit.slope_above = upper.slope;
            fit.intercept_above = upper.intercept;
            fit.threshold_dt = std::pow(10.0, x[b]);
        }
    }
    fit.threshold_found = std::abs(fit.slope_below - fit.slope_above) >= opts.single_regime_tol;
    if (!fit.threshold_found) {
        fit.single_regime = true;
        fit.threshold_dt = 0.0;
        fit.slope_below = fit.slope_above = single.slope;
        fit.intercept_below = fit.intercept_above = single.intercept;
    }
    return fit;
}

double saturation_plateau(const TimeSeries& reference) {
    TimeSeries frozen = reference;
    std::fill(frozen.values.begin(), frozen.values.end(), 1.0);
    return error_metrics(frozen, reference).avg_error;
}

ErrorReport analyze(std::span<const TimeSeries> runs, const TimeSeries& reference, double alpha, double omega_c) {
    ErrorReport report;
    report.plateau = saturation_plateau(reference);
    for (const auto& run : runs) {
        const auto m = error_metrics(run, reference);
        report.dt_values.push_back(run.config.dt);
        report.avg_errors.push_back(m.avg_error);
        report.steady_errors.push_back(m.steady_error);
        report.bound_values.push_back(sampling_bound(alpha, omega_c, run.config.dt));
    }
    RegimeFitOptions opts;
    opts.plateau = report.plateau;
    report.fit = fit_regimes(report.dt_values, report.avg_errors, opts);
    report.steady_fit = fit_regimes(report.dt_values, report.steady_errors, {});
    return report;
}

std::vector<double> synthetic_errors(std::span<const double> dt_values, double threshold, double p_below,
                                     double p_above, double noise, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double c_below = 1e-3;
    const double c_above = c_below * std::pow(threshold, p_below - p_above);
    std::vector<double> out;
    out.reserve(dt_values.size());
    for (double dt : dt_values) {
        const double clean = dt <= threshold ? c_below * std::pow(dt, p_below) : c_above * std::pow(dt, p_above);
        out.push_back(clean * std::exp(noise * gauss(rng)));
    }
    return out;
}

}  // namespace colchain
