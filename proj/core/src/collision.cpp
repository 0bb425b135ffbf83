#include "colchain/collision.hpp"

#include <cmath>
#include <map>

#include "colchain/errors.hpp"
#include "colchain/quadrature.hpp"

namespace colchain {

namespace {

using cplx = std::complex<double>;

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;

void check_common(double dt, std::size_t steps, double threshold) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("collision time step must be positive");
    if (steps < 1) throw ConfigError("collision kernel needs at least one step");
    if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("window threshold must lie in (0, 1)");
}

}  // namespace

CollisionKernel kernel_chain(const SpectralDensity& sd, double dt, std::size_t steps, std::size_t ancillae,
                             const ChainKernelOptions& opts) {
    check_common(dt, steps, opts.window_threshold);
    if (ancillae < 1) throw ConfigError("collision kernel needs at least one ancilla");
    CollisionKernel k;
    k.variant = KernelVariant::Chain;
    k.dt = dt;
    k.mode_spacing = opts.mode_spacing > 0.0 ? opts.mode_spacing : M_PI / sd.omega_c();
    k.mode_offset = opts.mode_offset;
    k.first_mode = opts.first_mode;
    k.g = sd.g();
    k.omega_c = sd.omega_c();
    k.W.resize(static_cast<Eigen::Index>(steps), static_cast<Eigen::Index>(ancillae));

    const double scale = sd.g() / std::sqrt(dt);
    // Equal spacing makes the kernel Toeplitz in (m - n); reuse entries by lag
    const bool toeplitz = std::abs(k.mode_spacing - dt) <= 1e-14 * dt;
    std::map<long, cplx> by_lag;
    for (std::size_t m = 0; m < steps; ++m) {
        for (std::size_t j = 0; j < ancillae; ++j) {
            const long n = opts.first_mode + static_cast<long>(j);
            const long lag = static_cast<long>(m) - n;
            cplx value;
            auto it = toeplitz ? by_lag.find(lag) : by_lag.end();
            if (it != by_lag.end()) {
                value = it->second;
            } else {
                const double tn = (static_cast<double>(n) + opts.mode_offset) * k.mode_spacing;
                const double a = static_cast<double>(m) * dt - tn;
                value = scale * fourier_sqrt_J_integral(sd, a, a + dt);
                if (toeplitz) by_lag.emplace(lag, value);
            }
            k.W(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(j)) = value;
        }
    }
    k.window = ancilla_window(k, opts.window_threshold);
    return k;
}

std::string to_string(KernelVariant v) { return v == KernelVariant::Chain ? "chain" : "timebin"; }

KernelVariant kernel_variant_from_string(const std::string& name) {
    if (name == "chain") return KernelVariant::Chain;
    if (name == "timebin") return KernelVariant::TimeBin;
    throw ConfigError("unknown kernel variant '" + name + "'");
}

CollisionKernel kernel_timebin(const SpectralDensity& sd, double dt, std::size_t steps, double window_threshold) {
    return kernel_timebin(sd, dt, steps, steps, 0, window_threshold);
}

CollisionKernel kernel_timebin(const SpectralDensity& sd, double dt, std::size_t steps, std::size_t bins,
                               long first_bin, double window_threshold) {
    check_common(dt, steps, window_threshold);
    if (bins < 1) throw ConfigError("collision kernel needs at least one ancilla");
    CollisionKernel k;
    k.variant = KernelVariant::TimeBin;
    k.dt = dt;
    k.mode_spacing = dt;
    k.mode_offset = 0.5;
    k.first_mode = first_bin;
    k.g = sd.g();
    k.omega_c = sd.omega_c();
    k.W.resize(static_cast<Eigen::Index>(steps), static_cast<Eigen::Index>(bins));

    // (1/dt^2) int_bin int_bin exp(-i w (t - t')) = sinc^2(w dt / 2) exp(-i w lag dt)
    const auto breaks = sd.breakpoints();
    const double scale = sd.g() * std::sqrt(dt) * kInvSqrt2Pi;
    std::map<long, cplx> by_lag;
    auto lag_value = [&](long lag) {
        const long key = std::labs(lag);
        auto it = by_lag.find(key);
        if (it == by_lag.end()) {
            const double shift = static_cast<double>(key) * dt;
            auto integrand = [&](double w) {
                const double x = 0.5 * w * dt;
                const double s = std::abs(x) < 1e-8 ? 1.0 : std::sin(x) / x;
                return std::sqrt(evaluate(sd, w)) * s * s * std::polar(1.0, -w * shift);
            };
            quad::Options opts;
            opts.abs_tol = 1e-12;
            opts.frequency = std::max(shift, dt);
            opts.max_intervals = 20000;
            it = by_lag.emplace(key, scale * quad::integrate<cplx>(integrand, breaks, opts).value).first;
        }
        return lag >= 0 ? it->second : std::conj(it->second);
    };
    for (std::size_t n = 0; n < steps; ++n) {
        for (std::size_t j = 0; j < bins; ++j) {
            const long lag = static_cast<long>(n) - (first_bin + static_cast<long>(j));
            k.W(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j)) = lag_value(lag);
        }
    }
    k.window = ancilla_window(k, window_threshold);
    return k;
}

std::vector<AncillaRange> ancilla_window(const CollisionKernel& kernel, double rel_threshold) {
    if (!(rel_threshold > 0.0 && rel_threshold < 1.0)) throw ConfigError("window threshold must lie in (0, 1)");
    std::vector<AncillaRange> out;
    out.reserve(kernel.steps());
    for (Eigen::Index m = 0; m < kernel.W.rows(); ++m) {
        const Eigen::VectorXd mag = kernel.W.row(m).cwiseAbs().transpose();
        const double top = mag.maxCoeff();
        if (!(top > 0.0)) {
            out.push_back({0, 0});  // all-zero row
            continue;
        }
        const double cut = rel_threshold * top;
        Eigen::Index first = 0;
        while (first < mag.size() && mag(first) < cut) ++first;
        Eigen::Index last = mag.size() - 1;
        while (last > first && mag(last) < cut) --last;
        out.push_back({static_cast<std::size_t>(first), static_cast<std::size_t>(last)});
    }
    return out;
}

}  // namespace colchain
