#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <gtest/gtest.h>

#include "colchain/errors.hpp"
#include "colchain/quadrature.hpp"
#include "colchain/specdens.hpp"

using namespace colchain;
using cd = std::complex<double>;

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

// Ohmic transform with w = u^2, which removes the sqrt(w) endpoint behaviour.
cd ohmic_oracle(double alpha, double wc, double tau) {
    const double umax = std::sqrt(wc);
    const auto rule = quad::composite_gauss_legendre(
        std::vector<double>{0.0, 0.25 * umax, 0.5 * umax, 0.75 * umax, umax}, 200);
    cd sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double u = rule.nodes[i];
        sum += rule.weights[i] * std::sqrt(2.0 * alpha) * u * std::polar(1.0, -u * u * tau) * 2.0 * u;
    }
    return kInvSqrt2Pi * sum;
}

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
    const auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST(SpectralDensity, FlatAndOhmicValues) {
    const auto flat = SpectralDensity::flat(2.0, 0.5);
    EXPECT_EQ(evaluate(flat, 1.0), 1.0);
    EXPECT_EQ(evaluate(flat, 2.5), 0.0);
    EXPECT_EQ(evaluate(flat, -0.1), 0.0);
    EXPECT_EQ(flat.g(), 0.5);

    const auto ohm = SpectralDensity::ohmic(0.1, 1.0);
    EXPECT_DOUBLE_EQ(evaluate(ohm, 0.5), 0.1);
    EXPECT_EQ(evaluate(ohm, 1.5), 0.0);
}

TEST(SpectralDensity, TotalWeight) {
    EXPECT_DOUBLE_EQ(total_weight(SpectralDensity::flat(3.0)), 3.0);
    EXPECT_DOUBLE_EQ(total_weight(SpectralDensity::ohmic(0.1, 2.0)), 0.4);
    const auto tab = SpectralDensity::tabulated({{0.0, 0.0}, {1.0, 2.0}, {3.0, 2.0}});
    EXPECT_DOUBLE_EQ(total_weight(tab), 5.0);
}

TEST(SpectralDensity, InvalidParametersRejected) {
    EXPECT_THROW(SpectralDensity::flat(0.0), ConfigError);
    EXPECT_THROW(SpectralDensity::ohmic(-0.1, 1.0), ConfigError);
    EXPECT_THROW(SpectralDensity::tabulated({}), ConfigError);
    EXPECT_THROW(SpectralDensity::tabulated({{0.0, 1.0}, {0.0, 1.0}}), ConfigError);
    EXPECT_THROW(SpectralDensity::tabulated({{0.0, -1.0}, {1.0, 1.0}}), ConfigError);
    EXPECT_THROW(spectral_kind_from_string("lorentzian"), ConfigError);
}

TEST(SpectralDensity, KindNamesRoundTrip) {
    for (auto k : {SpectralKind::Flat, SpectralKind::Ohmic, SpectralKind::Tabulated}) {
        EXPECT_EQ(spectral_kind_from_string(to_string(k)), k);
    }
}

TEST(FourierKernel, FlatClosedForm) {
    const double wc = 1.7;
    const auto sd = SpectralDensity::flat(wc);
    for (double tau : {-3.0, -0.2, 0.0, 1e-9, 0.4, 5.0, 37.0}) {
        // (1 - exp(-i wc tau)) / (i tau) without the cancellation at small tau
        const double x = 0.5 * wc * tau;
        const double sinc = x == 0.0 ? 1.0 : std::sin(x) / x;
        const cd expected = kInvSqrt2Pi * wc * sinc * std::polar(1.0, -x);
        EXPECT_LT(std::abs(fourier_sqrt_J(sd, tau) - expected), 1e-12) << tau;
    }
}

TEST(FourierKernel, OhmicMatchesSubstitutionOracle) {
    const auto sd = SpectralDensity::ohmic(0.1, 1.0);
    for (double tau : {0.0, 0.5, 3.0, 12.0, -7.5}) {
        EXPECT_LT(std::abs(fourier_sqrt_J(sd, tau) - ohmic_oracle(0.1, 1.0, tau)), 1e-9) << tau;
    }
}

TEST(FourierKernel, TabulatedEqualsFlatForConstantTable) {
    const auto tab = SpectralDensity::tabulated({{0.0, 1.0}, {1.0, 1.0}});
    const auto flat = SpectralDensity::flat(1.0);
    for (double tau : {0.0, 2.0, 9.0}) {
        EXPECT_LT(std::abs(fourier_sqrt_J(tab, tau) - fourier_sqrt_J(flat, tau)), 1e-9);
    }
}

TEST(FourierKernel, BinIntegralMatchesTimeQuadrature) {
    for (const auto& sd : {SpectralDensity::flat(1.0), SpectralDensity::ohmic(0.1, 1.0)}) {
        for (auto [a, b] : {std::pair{0.0, 0.5}, std::pair{-2.0, 1.0}, std::pair{10.0, 14.0}}) {
            quad::Options opts;
            opts.abs_tol = 1e-11;
            const cd direct =
                quad::integrate<cd>([&](double t) { return fourier_sqrt_J(sd, t); }, a, b, opts).value;
            EXPECT_LT(std::abs(fourier_sqrt_J_integral(sd, a, b) - direct), 1e-8);
        }
    }
}

TEST(FourierKernel, GridHelperMatchesPointwise) {
    const auto sd = SpectralDensity::flat(1.0);
    const std::vector<double> taus{0.0, 1.0, 2.0};
    const auto k = fourier_kernel(sd, taus);
    ASSERT_EQ(k.values.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(k.values[i], fourier_sqrt_J(sd, taus[i]));
}

TEST(LoadTabulated, ReadsHeaderAndRows) {
    const auto p = temp_file("colchain_sd_ok.csv", "omega,J\n0,0\n0.5,1\n1,2\n");
    const auto sd = load_tabulated(p, 0.3);
    EXPECT_EQ(sd.kind(), SpectralKind::Tabulated);
    EXPECT_EQ(sd.table().size(), 3u);
    EXPECT_DOUBLE_EQ(sd.omega_c(), 1.0);
    EXPECT_DOUBLE_EQ(sd.g(), 0.3);
    EXPECT_DOUBLE_EQ(evaluate(sd, 0.75), 1.5);
    std::filesystem::remove(p);
}

TEST(LoadTabulated, ReportsFailingRow) {
    const auto p = temp_file("colchain_sd_bad.csv", "omega,J\n0,0\n0.5,abc\n");
    try {
        load_tabulated(p);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.row(), 3u);
    }
    std::filesystem::remove(p);
}

TEST(LoadTabulated, MissingFile) {
    EXPECT_THROW(load_tabulated("/nonexistent/colchain.csv"), ConfigError);
}
