#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "colchain/collision.hpp"
#include "colchain/errors.hpp"
#include "colchain/quadrature.hpp"

using namespace colchain;
using cd = std::complex<double>;

namespace {

cd bin_integral_direct(const SpectralDensity& sd, double a, double b) {
    quad::Options opts;
    opts.abs_tol = 1e-12;
    return quad::integrate<cd>([&](double t) { return fourier_sqrt_J(sd, t); }, a, b, opts).value;
}

}  // namespace

TEST(ChainKernel, EntriesMatchTimeQuadrature) {
    const auto sd = SpectralDensity::ohmic(0.1, 1.0, 0.8);
    const double dt = 0.7;
    ChainKernelOptions opts;
    opts.mode_spacing = dt;
    opts.mode_offset = 0.5;
    opts.first_mode = -2;
    const auto k = kernel_chain(sd, dt, 4, 9, opts);
    ASSERT_EQ(k.steps(), 4u);
    ASSERT_EQ(k.ancillae(), 9u);
    for (Eigen::Index m = 0; m < 4; ++m) {
        for (Eigen::Index j = 0; j < 9; ++j) {
            const double tn = (static_cast<double>(j - 2) + 0.5) * dt;
            const double a = static_cast<double>(m) * dt - tn;
            const cd expected = 0.8 / std::sqrt(dt) * bin_integral_direct(sd, a, a + dt);
            EXPECT_LT(std::abs(k.W(m, j) - expected), 1e-8) << m << " " << j;
        }
    }
}

TEST(ChainKernel, DefaultSpacingIsNotToeplitzButStillExact) {
    const auto sd = SpectralDensity::flat(1.0);
    const double dt = 0.4;
    const auto k = kernel_chain(sd, dt, 3, 3);
    EXPECT_DOUBLE_EQ(k.mode_spacing, std::numbers::pi);
    for (Eigen::Index m = 0; m < 3; ++m) {
        for (Eigen::Index n = 0; n < 3; ++n) {
            const double a = static_cast<double>(m) * dt - static_cast<double>(n) * std::numbers::pi;
            EXPECT_LT(std::abs(k.W(m, n) - bin_integral_direct(sd, a, a + dt) / std::sqrt(dt)), 1e-8);
        }
    }
}

TEST(ChainKernel, ToeplitzWhenSpacingEqualsStep) {
    const auto sd = SpectralDensity::flat(1.0);
    ChainKernelOptions opts;
    opts.mode_spacing = 1.0;
    const auto k = kernel_chain(sd, 1.0, 5, 5, opts);
    for (Eigen::Index m = 1; m < 5; ++m)
        for (Eigen::Index n = 1; n < 5; ++n) EXPECT_EQ(k.W(m, n), k.W(m - 1, n - 1));
}

// Modes spaced by dt resolve the band-limited bath, so summed |W|^2 over all modes gives
// the bin-averaged correlation g^2 int J sinc^2(w dt / 2) dw.
TEST(ChainKernel, ModeCompletenessForSpacingBelowNyquist) {
    const double dt = 1.5;
    const auto sd = SpectralDensity::flat(1.0, 1.0);
    ChainKernelOptions opts;
    opts.mode_spacing = dt;
    opts.mode_offset = 0.5;
    const long half = 1500;
    opts.first_mode = -half;
    const auto k = kernel_chain(sd, dt, 1, 2 * half + 1, opts);
    // modes beyond |n| = half contribute about 2 / (pi half dt) through the 1/t tails
    const double sum = k.W.row(0).squaredNorm() + 2.0 / (std::numbers::pi * static_cast<double>(half) * dt);
    const double expected =
        quad::integrate<double>(
            [&](double w) {
                const double x = 0.5 * w * dt;
                const double s = x == 0.0 ? 1.0 : std::sin(x) / x;
                return s * s;
            },
            0.0, 1.0)
            .value;
    EXPECT_NEAR(sum, expected, 1e-4 * expected);
}

TEST(TimeBinKernel, MatchesDoubleTimeIntegral) {
    const auto sd = SpectralDensity::ohmic(0.1, 1.0, 1.3);
    const double dt = 0.9;
    const auto k = kernel_timebin(sd, dt, 3, 5, -1);
    for (Eigen::Index n = 0; n < 3; ++n) {
        for (Eigen::Index j = 0; j < 5; ++j) {
            const double bm = static_cast<double>(j - 1) * dt;
            quad::Options opts;
            opts.abs_tol = 1e-11;
            const cd inner_outer =
                quad::integrate<cd>(
                    [&](double t) { return fourier_sqrt_J_integral(sd, t - bm - dt, t - bm); },
                    static_cast<double>(n) * dt, static_cast<double>(n + 1) * dt, opts)
                    .value;
            const cd expected = 1.3 / std::pow(dt, 1.5) * inner_outer;
            EXPECT_LT(std::abs(k.W(n, j) - expected), 1e-8) << n << " " << j;
        }
    }
}

TEST(TimeBinKernel, SquareFormIsHermitian) {
    const auto k = kernel_timebin(SpectralDensity::flat(1.0), 0.5, 6);
    EXPECT_LT((k.W - k.W.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_EQ(to_string(k.variant), "timebin");
    EXPECT_EQ(kernel_variant_from_string("chain"), KernelVariant::Chain);
    EXPECT_THROW(kernel_variant_from_string("band"), ConfigError);
}

TEST(Window, HullAgreesWithDirectScan) {
    const double wc = 1.0;
    const auto sd = SpectralDensity::flat(wc);
    const double dt = std::numbers::pi / wc;
    ChainKernelOptions opts;
    opts.mode_spacing = dt;
    opts.mode_offset = 0.5;
    opts.first_mode = -20;
    opts.window_threshold = 0.1;
    const auto k = kernel_chain(sd, dt, 6, 46, opts);
    ASSERT_EQ(k.window.size(), 6u);
    for (Eigen::Index m = 0; m < 6; ++m) {
        const double cut = 0.1 * k.W.row(m).cwiseAbs().maxCoeff();
        std::size_t first = 46;
        std::size_t last = 0;
        for (Eigen::Index j = 0; j < 46; ++j) {
            if (std::abs(k.W(m, j)) >= cut) {
                first = std::min<std::size_t>(first, j);
                last = std::max<std::size_t>(last, j);
            }
        }
        EXPECT_EQ(k.window[m].first, first);
        EXPECT_EQ(k.window[m].last, last);
        // hull is centered on the step's own mode
        EXPECT_EQ(k.window[m].first + k.window[m].last, 2 * static_cast<std::size_t>(m + 20));
    }
}

TEST(Window, ZeroRowGivesSingleColumn) {
    CollisionKernel k;
    k.W = Eigen::MatrixXcd::Zero(1, 4);
    const auto w = ancilla_window(k, 0.5);
    EXPECT_EQ(w[0].first, 0u);
    EXPECT_EQ(w[0].width(), 1u);
}

TEST(Kernels, InvalidArgumentsRejected) {
    const auto sd = SpectralDensity::flat(1.0);
    EXPECT_THROW(kernel_chain(sd, 0.0, 2, 2), ConfigError);
    EXPECT_THROW(kernel_chain(sd, 1.0, 0, 2), ConfigError);
    EXPECT_THROW(kernel_chain(sd, 1.0, 2, 0), ConfigError);
    ChainKernelOptions bad;
    bad.window_threshold = 1.0;
    EXPECT_THROW(kernel_chain(sd, 1.0, 2, 2, bad), ConfigError);
    EXPECT_THROW(kernel_timebin(sd, 1.0, 2, 0, 0), ConfigError);
}
