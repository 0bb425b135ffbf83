#include "colchain/orthopoly.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "colchain/errors.hpp"
#include "colchain/quadrature.hpp"

namespace colchain {

namespace {

struct DiscreteMeasure {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss–Legendre discretization of J(w)dw on the support; one composite panel
// per tabulated segment so that piecewise-linear J is integrated exactly.
DiscreteMeasure discretize(const SpectralDensity& sd, std::size_t quad_points) {
    const auto breaks = sd.breakpoints();
    const std::size_t panels = breaks.size() - 1;
    const std::size_t per_panel = std::max<std::size_t>(8, (quad_points + panels - 1) / panels);
    const auto rule = quad::composite_gauss_legendre(breaks, per_panel);
    DiscreteMeasure m;
    m.x.reserve(rule.nodes.size());
    m.w.reserve(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double weight = rule.weights[i] * evaluate(sd, rule.nodes[i]);
        if (weight > 0.0) {
            m.x.push_back(rule.nodes[i]);
            m.w.push_back(weight);
        }
    }
    return m;
}

void check_request(std::size_t N, std::size_t quad_points) {
    if (N < 1) throw ConfigError("at least one chain mode is required");
    if (quad_points < 4 * N) {
        throw ConfigError("quad_points must be at least 4N (got " + std::to_string(quad_points) + " for N=" +
                          std::to_string(N) + ")");
    }
}

// Assemble (A, B, C) from orthonormal Jacobi entries a[0..N-1], b[0..N] (b[0] unused).
RecurrenceCoefficients from_jacobi(const std::vector<double>& a, const std::vector<double>& b, std::size_t N,
                                   double norm_p0) {
    RecurrenceCoefficients rc;
    rc.N = N;
    rc.norm_p0 = norm_p0;
    rc.A.resize(N);
    rc.B.resize(N);
    rc.C.resize(N);
    for (std::size_t n = 0; n < N; ++n) {
        rc.C[n] = 1.0 / b[n + 1];
        rc.A[n] = a[n] / b[n + 1];
        rc.B[n] = n == 0 ? 0.0 : -b[n] / b[n + 1];
    }
    return rc;
}

double measure_mass(const DiscreteMeasure& m) {
    double mass = 0.0;
    for (double w : m.w) mass += w;
    if (!(mass > 0.0)) throw ConfigError("spectral density has zero total weight");
    return mass;
}

}  // namespace

RecurrenceCoefficients stieltjes_recurrence(const SpectralDensity& sd, std::size_t N, std::size_t quad_points) {
    check_request(N, quad_points);
    const DiscreteMeasure m = discretize(sd, quad_points);
    const double mass = measure_mass(m);
    const std::size_t M = m.x.size();
    if (M <= N) throw ConfigError("discretized measure has fewer support points than requested modes");

    std::vector<double> a(N, 0.0);
    std::vector<double> b(N + 1, 0.0);
    std::vector<double> p(M, 1.0 / std::sqrt(mass));
    std::vector<double> p_prev(M, 0.0);
    std::vector<double> q(M, 0.0);

    for (std::size_t k = 0; k < N; ++k) {
        double ak = 0.0;
        for (std::size_t i = 0; i < M; ++i) ak += m.w[i] * m.x[i] * p[i] * p[i];
        a[k] = ak;
        double norm2 = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            q[i] = (m.x[i] - ak) * p[i] - b[k] * p_prev[i];
            norm2 += m.w[i] * q[i] * q[i];
        }
        if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
            throw InstabilityError("Stieltjes recurrence lost positivity of the polynomial norm", k + 1);
        }
        b[k + 1] = std::sqrt(norm2);
        for (std::size_t i = 0; i < M; ++i) {
            p_prev[i] = p[i];
            p[i] = q[i] / b[k + 1];
        }
    }
    return from_jacobi(a, b, N, std::sqrt(mass));
}

RecurrenceCoefficients lanczos_recurrence(const SpectralDensity& sd, std::size_t N, std::size_t quad_points) {
    check_request(N, quad_points);
    const DiscreteMeasure m = discretize(sd, quad_points);
    const double mass = measure_mass(m);
    const Eigen::Index M = static_cast<Eigen::Index>(m.x.size());
    if (static_cast<std::size_t>(M) <= N) {
        throw ConfigError("discretized measure has fewer support points than requested modes");
    }

    const Eigen::Map<const Eigen::VectorXd> x(m.x.data(), M);
    Eigen::MatrixXd Q(M, static_cast<Eigen::Index>(N) + 1);
    for (Eigen::Index i = 0; i < M; ++i) Q(i, 0) = std::sqrt(m.w[static_cast<std::size_t>(i)] / mass);

    std::vector<double> a(N, 0.0);
    std::vector<double> b(N + 1, 0.0);
    for (std::size_t k = 0; k < N; ++k) {
        const Eigen::Index kk = static_cast<Eigen::Index>(k);
        Eigen::VectorXd v = x.cwiseProduct(Q.col(kk));
        a[k] = Q.col(kk).dot(v);
        // Full reorthogonalization against every previous Lanczos vector, twice
        for (int pass = 0; pass < 2; ++pass) {
            const Eigen::VectorXd coeff = Q.leftCols(kk + 1).transpose() * v;
            v -= Q.leftCols(kk + 1) * coeff;
        }
        const double beta = v.norm();
        if (!(beta > 0.0) || !std::isfinite(beta)) {
            throw InstabilityError("Lanczos recurrence lost positivity of the polynomial norm", k + 1);
        }
        b[k + 1] = beta;
        Q.col(kk + 1) = v / beta;
    }
    return from_jacobi(a, b, N, std::sqrt(mass));
}

ChainCoefficients chain_coefficients(const RecurrenceCoefficients& rc) {
    if (rc.A.size() != rc.N || rc.C.size() != rc.N || rc.B.size() != rc.N) {
        throw ConfigError("recurrence coefficient lengths do not match N");
    }
    ChainCoefficients chain;
    chain.N = rc.N;
    chain.kappa = rc.norm_p0;
    chain.epsilon.resize(rc.N);
    chain.t.resize(rc.N);
    for (std::size_t n = 0; n < rc.N; ++n) {
        if (!(rc.C[n] > 0.0)) throw InstabilityError("non-positive leading coefficient C_n", n);
        chain.epsilon[n] = rc.A[n] / rc.C[n];
        chain.t[n] = 1.0 / rc.C[n];
    }
    return chain;
}

ChainCoefficients chain_coefficients(const SpectralDensity& sd, std::size_t N, std::size_t quad_points) {
    return chain_coefficients(stieltjes_recurrence(sd, N, quad_points));
}

std::vector<double> shifted_legendre_all(std::size_t nmax, double x) {
    std::vector<double> out(nmax + 1);
    const double y = 2.0 * x - 1.0;
    double p_prev = 1.0;
    double p = y;
    out[0] = 1.0;
    if (nmax >= 1) out[1] = std::sqrt(3.0) * y;
    for (std::size_t k = 1; k < nmax; ++k) {
        const double kd = static_cast<double>(k);
        const double next = ((2.0 * kd + 1.0) * y * p - kd * p_prev) / (kd + 1.0);
        p_prev = p;
        p = next;
        out[k + 1] = std::sqrt(2.0 * kd + 3.0) * next;
    }
    return out;
}

double shifted_legendre(std::size_t n, double x) { return shifted_legendre_all(n, x)[n]; }

std::vector<double> chain_spectrum(const ChainCoefficients& chain) {
    const Eigen::Index N = static_cast<Eigen::Index>(chain.N);
    if (N == 0) return {};
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(chain.epsilon.data(), N);
    Eigen::VectorXd sub(std::max<Eigen::Index>(N - 1, 0));
    for (Eigen::Index i = 0; i + 1 < N; ++i) sub(i) = chain.t[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

}  // namespace colchain
