#include <numbers>
#include <random>

#include <benchmark/benchmark.h>

#include "colchain/collision.hpp"
#include "colchain/couplings.hpp"
#include "colchain/models.hpp"
#include "colchain/mps.hpp"
#include "colchain/orthopoly.hpp"

using namespace colchain;

namespace {

CMatrix random_unitary(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    CMatrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = cplx(nd(rng), nd(rng));
    return Eigen::HouseholderQR<CMatrix>(a).householderQ();
}

void BM_ChainCoefficients(benchmark::State& state) {
    const auto sd = SpectralDensity::ohmic(0.1, 1.0);
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(chain_coefficients(sd, n));
}
BENCHMARK(BM_ChainCoefficients)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_GammaBessel(benchmark::State& state) {
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gamma_flat_bessel(20, t, 1.0, 1.0));
        t += 0.01;
    }
}
BENCHMARK(BM_GammaBessel);

void BM_GammaQuadrature(benchmark::State& state) {
    const auto sd = SpectralDensity::flat(1.0);
    for (auto _ : state) benchmark::DoNotOptimize(gamma_quadrature(sd, PolyMeasure::FlatMeasure, 20, 40.0));
}
BENCHMARK(BM_GammaQuadrature)->Unit(benchmark::kMicrosecond);

void BM_KernelChain(benchmark::State& state) {
    const auto sd = SpectralDensity::ohmic(0.1, 1.0);
    const auto steps = static_cast<std::size_t>(state.range(0));
    ChainKernelOptions opts;
    opts.mode_spacing = 1.0;
    opts.mode_offset = 0.5;
    for (auto _ : state) benchmark::DoNotOptimize(kernel_chain(sd, 1.0, steps, steps, opts));
}
BENCHMARK(BM_KernelChain)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

// Two-site update at bond dimension D with d = 6 (SVD of a 6D x 6D matrix)
void BM_GateApplication(benchmark::State& state) {
    const auto D = static_cast<std::size_t>(state.range(0));
    const std::size_t d = 6;
    std::mt19937_64 rng(1);
    std::vector<CVector> locals(8, CVector::Ones(static_cast<Eigen::Index>(d)));
    auto psi = MPSState::product(locals);
    const TruncationPolicy policy{D, 1e-14};
    for (int sweep = 0; sweep < 4; ++sweep)
        for (std::size_t s = 0; s + 1 < psi.size(); ++s) psi.apply_gate({s, random_unitary(d * d, rng), 0, 0}, policy);
    const CMatrix u = random_unitary(d * d, rng);
    for (auto _ : state) {
        auto copy = psi;
        copy.apply_gate({3, u, 0, 0}, policy);
        benchmark::DoNotOptimize(copy);
    }
    state.counters["bond"] = static_cast<double>(psi.bond_dim(3));
}
BENCHMARK(BM_GateApplication)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_CollisionRun(benchmark::State& state) {
    SpinBosonConfig cfg;
    cfg.representation = Representation::CollisionNonMarkovian;
    cfg.dt = 2.0;
    cfg.horizon = 20.0;
    cfg.policy.max_bond = 16;
    for (auto _ : state) benchmark::DoNotOptimize(run(cfg));
}
BENCHMARK(BM_CollisionRun)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace

BENCHMARK_MAIN();
