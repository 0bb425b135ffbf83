#include "colchain/models.hpp"

#include <algorithm>
#include <cmath>

#include "colchain/errors.hpp"
#include "colchain/orthopoly.hpp"

namespace colchain {

namespace {

constexpr double kSqrt2Pi = 2.506628274631000502415765284811;
constexpr double kDiscardedWarning = 1e-6;

CMatrix spin_hamiltonian(const SpinBosonConfig& cfg) {
    return 0.5 * cfg.omega_0 * sigma_z() + cfg.delta * sigma_x();
}

// sigma_x (x) (w b + conj(w) b^dag) or its mirror, on (spin, boson) or (boson, spin)
CMatrix coupling_term(std::size_t d, cplx w, bool spin_first) {
    const CMatrix b = annihilation(d);
    const CMatrix field = w * b + std::conj(w) * b.adjoint();
    return spin_first ? kron(sigma_x(), field) : kron(field, sigma_x());
}

struct Recorder {
    TimeSeries series;

    void record(double t, const MPSState& psi, std::size_t spin_site) {
        series.times.push_back(t);
        series.values.push_back(std::clamp(psi.expectation_local(spin_site, sigma_z()).real(), -1.0, 1.0));
        series.discarded_weight.push_back(psi.discarded_weight());
        const std::size_t bond = psi.max_bond_dim();
        series.max_bond.push_back(series.max_bond.empty() ? bond : std::max(bond, series.max_bond.back()));
    }

    TimeSeries finish(const SpinBosonConfig& cfg, std::size_t bath_sites) {
        series.config = cfg;
        series.ancillae = bath_sites;
        if (!series.discarded_weight.empty() && series.discarded_weight.back() > kDiscardedWarning) {
            series.warnings.push_back("discarded weight " + std::to_string(series.discarded_weight.back()) +
                                      " exceeds " + std::to_string(kDiscardedWarning));
        }
        if (!series.max_bond.empty() && series.max_bond.back() >= cfg.policy.max_bond) {
            series.warnings.push_back("bond dimension saturated at " + std::to_string(cfg.policy.max_bond));
        }
        return std::move(series);
    }
};

// Couplings to vacuum modes enter only through W B W^dag, so a block of columns may be
// replaced by U Sigma from its SVD. Directions with sigma <= tol * sigma_max are dropped.
CMatrix fold_tail(const CMatrix& block, double tol) {
    if (block.cols() == 0) return CMatrix(block.rows(), 0);
    const CMatrix gram = block * block.adjoint();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram);
    const Eigen::VectorXd& lam = eig.eigenvalues();  // ascending
    const double top = std::max(lam(lam.size() - 1), 0.0);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = lam.size(); k-- > 0;) {
        if (!(lam(k) > tol * tol * top) || keep.size() >= static_cast<std::size_t>(block.cols())) break;
        keep.push_back(k);
    }
    CMatrix out(block.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
        out.col(static_cast<Eigen::Index>(i)) = eig.eigenvectors().col(keep[i]) * std::sqrt(lam(keep[i]));
    }
    return out;
}

MPSState initial_state(std::size_t bath_sites, std::size_t d) {
    std::vector<CVector> local;
    CVector up = CVector::Zero(2);
    up(0) = 1.0;
    local.push_back(up);
    CVector vac = CVector::Zero(static_cast<Eigen::Index>(d));
    vac(0) = 1.0;
    for (std::size_t k = 0; k < bath_sites; ++k) local.push_back(vac);
    return MPSState::product(local);
}

}  // namespace

std::string to_string(Representation r) {
    switch (r) {
        case Representation::Tedopa: return "tedopa";
        case Representation::CollisionNonMarkovian: return "collision_nonmarkovian";
        case Representation::CollisionMarkovian: return "collision_markovian";
    }
    return "unknown";
}

Representation representation_from_string(const std::string& name) {
    if (name == "tedopa") return Representation::Tedopa;
    if (name == "collision_nonmarkovian") return Representation::CollisionNonMarkovian;
    if (name == "collision_markovian") return Representation::CollisionMarkovian;
    throw ConfigError("unknown representation '" + name + "'");
}

std::string to_string(BathKind b) { return b == BathKind::Ohmic ? "ohmic" : "flat"; }

BathKind bath_kind_from_string(const std::string& name) {
    if (name == "ohmic") return BathKind::Ohmic;
    if (name == "flat") return BathKind::Flat;
    throw ConfigError("unknown bath kind '" + name + "'");
}

std::string to_string(WindowMode w) { return w == WindowMode::Threshold ? "threshold" : "diagonal"; }

WindowMode window_mode_from_string(const std::string& name) {
    if (name == "threshold") return WindowMode::Threshold;
    if (name == "diagonal") return WindowMode::Diagonal;
    throw ConfigError("unknown window mode '" + name + "'");
}

void SpinBosonConfig::validate() const {
    auto finite = [](double x) { return std::isfinite(x); };
    if (!finite(omega_0) || omega_0 < 0.0) throw ConfigError("omega_0 must be finite and nonnegative");
    if (!finite(delta)) throw ConfigError("delta must be finite");
    if (!finite(alpha) || alpha < 0.0) throw ConfigError("alpha must be finite and nonnegative");
    if (!finite(omega_c) || omega_c <= 0.0) throw ConfigError("omega_c must be positive");
    if (!finite(g)) throw ConfigError("g must be finite");
    if (!finite(dt) || dt <= 0.0) throw ConfigError("dt must be positive");
    if (!finite(horizon) || horizon <= 0.0) throw ConfigError("horizon must be positive");
    if (dt > horizon) throw ConfigError("dt must not exceed the horizon");
    if (local_dim < 2) throw ConfigError("local_dim must be at least 2");
    if (representation == Representation::Tedopa && n_modes < 1) throw ConfigError("n_modes must be at least 1");
    if (!(window_threshold > 0.0 && window_threshold < 1.0)) throw ConfigError("window_threshold must lie in (0, 1)");
    if (!finite(tail_length) || tail_length < 0.0) throw ConfigError("tail_length must be finite and nonnegative");
    if (!(tail_tolerance > 0.0 && tail_tolerance < 1.0)) throw ConfigError("tail_tolerance must lie in (0, 1)");
    policy.validate();
}

SpectralDensity bath_density(const SpinBosonConfig& cfg) {
    if (cfg.bath == BathKind::Ohmic) return SpectralDensity::ohmic(cfg.alpha, cfg.omega_c, cfg.g);
    return SpectralDensity::flat(cfg.omega_c, cfg.g * std::sqrt(2.0 * cfg.alpha * cfg.omega_c));
}

CMatrix sigma_x() {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return m;
}

CMatrix sigma_z() {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

CMatrix annihilation(std::size_t d) {
    CMatrix b = CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t n = 1; n < d; ++n) {
        b(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n)) = std::sqrt(static_cast<double>(n));
    }
    return b;
}

std::size_t collision_steps(const SpinBosonConfig& cfg) {
    return static_cast<std::size_t>(std::ceil(cfg.horizon / cfg.dt - 1e-9));
}

TimeSeries run_tedopa(const SpinBosonConfig& cfg) {
    cfg.validate();
    const SpectralDensity sd = bath_density(cfg);
    const std::size_t N = cfg.n_modes;
    const std::size_t d = cfg.local_dim;
    const ChainCoefficients chain = chain_coefficients(sd, N, std::max<std::size_t>(kDefaultQuadPoints, 4 * N));

    const CMatrix b = annihilation(d);
    const CMatrix num = b.adjoint() * b;
    const CMatrix id_b = CMatrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    const CMatrix id_s = CMatrix::Identity(2, 2);

    // Bond j couples site j and j + 1; site 0 is the spin, site k + 1 is chain mode k.
    // On-site energies are shared between the two bonds a mode belongs to.
    std::vector<CMatrix> bond_h(N);
    for (std::size_t j = 0; j < N; ++j) {
        const std::size_t mode = j;  // right site of bond j
        const double right_share = (mode + 1 < N) ? 0.5 : 1.0;
        CMatrix h;
        if (j == 0) {
            h = kron(spin_hamiltonian(cfg), id_b) + sd.g() * chain.kappa * kron(sigma_x(), b + b.adjoint()) +
                right_share * chain.epsilon[0] * kron(id_s, num);
        } else {
            const std::size_t left_mode = j - 1;
            const double left_share = 0.5;
            h = left_share * chain.epsilon[left_mode] * kron(num, id_b) +
                right_share * chain.epsilon[mode] * kron(id_b, num) +
                chain.t[left_mode] * (kron(b.adjoint(), b) + kron(b, b.adjoint()));
        }
        bond_h[j] = h;
    }
    std::vector<TwoSiteGate> half_gates(N);
    for (std::size_t j = 0; j < N; ++j) half_gates[j] = {j, expm_hermitian(bond_h[j], 0.5 * cfg.dt), 0, 0};

    MPSState psi = initial_state(N, d);
    Recorder rec;
    rec.record(0.0, psi, 0);
    const std::size_t steps = collision_steps(cfg);
    for (std::size_t step = 1; step <= steps; ++step) {
        for (std::size_t j = 0; j < N; ++j) psi.apply_gate(half_gates[j], cfg.policy, CenterMove::Right);
        for (std::size_t j = N; j-- > 0;) psi.apply_gate(half_gates[j], cfg.policy, CenterMove::Left);
        rec.record(static_cast<double>(step) * cfg.dt, psi, 0);
    }
    return rec.finish(cfg, N);
}

TimeSeries run_collision_nonmarkovian(const SpinBosonConfig& cfg) {
    cfg.validate();
    const SpectralDensity sd = bath_density(cfg);
    const std::size_t steps = collision_steps(cfg);
    const std::size_t d = cfg.local_dim;

    // Modes peaked before t = 0 and after the horizon reach the simulated bins through
    // the algebraic tails of F[sqrt J]. They enter as explicit columns on both sides and
    // are then folded into a few tail modes.
    const bool diagonal = cfg.window_mode == WindowMode::Diagonal;
    const auto pad = diagonal ? std::size_t{0}
                              : static_cast<std::size_t>(std::ceil(cfg.tail_length * static_cast<double>(steps)));
    CollisionKernel kernel;
    if (cfg.kernel == KernelVariant::Chain) {
        ChainKernelOptions kopts;
        kopts.mode_spacing = cfg.dt;
        kopts.mode_offset = 0.5;
        kopts.first_mode = -static_cast<long>(pad);
        kopts.window_threshold = cfg.window_threshold;
        kernel = kernel_chain(sd, cfg.dt, steps, steps + 2 * pad, kopts);
    } else {
        kernel = kernel_timebin(sd, cfg.dt, steps, steps + 2 * pad, -static_cast<long>(pad), cfg.window_threshold);
    }
    const auto S = static_cast<Eigen::Index>(steps);

    // Columns of C are bath sites in chain order; window[m] lists the sites step m touches.
    CMatrix C;
    std::vector<AncillaRange> window(steps);
    if (diagonal) {
        C = CMatrix::Zero(S, S);
        for (Eigen::Index m = 0; m < S; ++m) {
            Eigen::Index best = 0;
            kernel.W.row(m).cwiseAbs().maxCoeff(&best);
            C(m, m) = kernel.W(m, best);
            window[static_cast<std::size_t>(m)] = {static_cast<std::size_t>(m), static_cast<std::size_t>(m)};
        }
    } else {
        // Explicit sites: modes inside the horizon that some thresholded window reaches;
        // the rest is folded
        std::size_t jmin = kernel.window.front().first;
        std::size_t jmax = kernel.window.front().last;
        for (const auto& w : kernel.window) {
            jmin = std::min(jmin, w.first);
            jmax = std::max(jmax, w.last);
        }
        jmin = std::clamp(jmin, pad, pad + steps - 1);
        jmax = std::clamp(jmax, jmin, pad + steps - 1);
        const auto lo = static_cast<Eigen::Index>(jmin);
        const auto width = static_cast<Eigen::Index>(jmax - jmin + 1);
        const CMatrix left = fold_tail(kernel.W.leftCols(lo), cfg.tail_tolerance);
        const CMatrix right = fold_tail(kernel.W.rightCols(kernel.W.cols() - lo - width), cfg.tail_tolerance);
        C.resize(S, left.cols() + width + right.cols());
        C << left, kernel.W.middleCols(lo, width), right;
        for (auto& w : window) w = {0, static_cast<std::size_t>(C.cols() - 1)};
    }
    const std::size_t M = static_cast<std::size_t>(C.cols());

    const CMatrix hs_gate = expm_hermitian(spin_hamiltonian(cfg), cfg.dt);
    MPSState psi = initial_state(M, d);
    std::size_t spin = 0;  // bath sites of rank < spin sit to the left of the spin
    Recorder rec;
    rec.record(0.0, psi, spin);
    for (std::size_t m = 0; m < steps; ++m) {
        const auto row = static_cast<Eigen::Index>(m);
        const std::size_t lo = window[m].first;
        const std::size_t hi = window[m].last;
        psi.swap_to(spin, lo, cfg.policy);
        spin = lo;
        psi.move_center(spin);
        for (std::size_t r = lo; r <= hi; ++r) {
            const CMatrix u = expm_hermitian(coupling_term(d, C(row, static_cast<Eigen::Index>(r)), true), 0.5 * cfg.dt);
            psi.apply_gate(fused_swap_gate(spin, 2, d, u), cfg.policy, CenterMove::Right);
            ++spin;
        }
        psi.apply_local(spin, hs_gate);
        for (std::size_t r = hi + 1; r-- > lo;) {
            const CMatrix u = expm_hermitian(coupling_term(d, C(row, static_cast<Eigen::Index>(r)), false), 0.5 * cfg.dt);
            psi.apply_gate(fused_swap_gate(spin - 1, d, 2, u), cfg.policy, CenterMove::Left);
            --spin;
        }
        rec.record(static_cast<double>(m + 1) * cfg.dt, psi, spin);
    }
    return rec.finish(cfg, M);
}

TimeSeries run_collision_markovian(const SpinBosonConfig& cfg) {
    cfg.validate();
    SpinBosonConfig flat_cfg = cfg;
    flat_cfg.bath = BathKind::Flat;
    const double g_flat = bath_density(flat_cfg).g();
    const std::size_t steps = collision_steps(cfg);
    const std::size_t d = cfg.local_dim;
    const double c = kSqrt2Pi * g_flat / std::sqrt(cfg.dt);
    const CMatrix h = kron(spin_hamiltonian(cfg), CMatrix::Identity(static_cast<Eigen::Index>(d),
                                                                     static_cast<Eigen::Index>(d))) +
                      coupling_term(d, c, true);
    const CMatrix u = expm_hermitian(h, cfg.dt);

    MPSState psi = initial_state(steps, d);
    Recorder rec;
    rec.record(0.0, psi, 0);
    for (std::size_t n = 0; n < steps; ++n) {
        psi.apply_gate(fused_swap_gate(n, 2, d, u), cfg.policy, CenterMove::Right);
        rec.record(static_cast<double>(n + 1) * cfg.dt, psi, n + 1);
    }
    return rec.finish(cfg, steps);
}

TimeSeries run(const SpinBosonConfig& cfg) {
    switch (cfg.representation) {
        case Representation::Tedopa: return run_tedopa(cfg);
        case Representation::CollisionNonMarkovian: return run_collision_nonmarkovian(cfg);
        case Representation::CollisionMarkovian: return run_collision_markovian(cfg);
    }
    throw ConfigError("unknown representation");
}

}  // namespace colchain
