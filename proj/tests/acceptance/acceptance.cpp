// acceptance: one PASS/FAIL line per primary criterion, with INFO lines for the measured values.
// Exit status is 0 once every criterion has been evaluated; --strict also fails on any FAIL verdict.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "colchain/analysis.hpp"
#include "colchain/collision.hpp"
#include "colchain/couplings.hpp"
#include "colchain/models.hpp"
#include "colchain/mps.hpp"
#include "colchain/orthopoly.hpp"

using namespace colchain;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void info(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void info(const char* fmt, ...) {
    std::printf("INFO  ");
    va_list args;
    va_start(args, fmt);
    std::vprintf(fmt, args);
    va_end(args);
    std::printf("\n");
    std::fflush(stdout);
}

struct Verdict {
    bool pass{false};
    std::string detail;
};

int g_failed = 0;

void report(int id, const char* name, double limit_s, const std::function<Verdict()>& body) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("error: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    const bool in_time = secs < limit_s;
    if (!in_time) v.detail += "; over time limit";
    const bool pass = v.pass && in_time;
    if (!pass) ++g_failed;
    std::printf("%s  [%d] %s: %s (%.2f s, limit %.0f s)\n", pass ? "PASS" : "FAIL", id, name, v.detail.c_str(), secs,
                limit_s);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), f, a);
    return buf;
}

// 1 --------------------------------------------------------------------------------------------
Verdict chain_closed_forms() {
    const double wc = 1.0;
    const auto chain = chain_coefficients(SpectralDensity::flat(wc), 31);
    double worst = 0.0;
    for (std::size_t n = 0; n <= 30; ++n) {
        const double t = 0.5 * wc * (n + 1.0) / std::sqrt((2.0 * n + 1.0) * (2.0 * n + 3.0));
        worst = std::max(worst, std::abs(chain.epsilon[n] - 0.5 * wc) / (0.5 * wc));
        worst = std::max(worst, std::abs(chain.t[n] - t) / t);
    }
    return {worst <= 1e-10, fmt("max relative error %.2e over n <= 30 (tol 1e-10)", worst)};
}

// 2 --------------------------------------------------------------------------------------------
Verdict coupling_oracle() {
    const double g = 1.0;
    const double wc = 1.0;
    const auto sd = SpectralDensity::flat(wc, g);
    double worst = 0.0;
    for (std::size_t n = 0; n <= 20; ++n) {
        for (int k = 0; k <= 200; ++k) {
            const double t = 0.25 * k / wc;
            const cplx q = g * gamma_quadrature(sd, PolyMeasure::FlatMeasure, n, t);
            worst = std::max(worst, std::abs(gamma_flat_bessel(n, t, g, wc) - q));
        }
    }
    return {worst <= 1e-8 * g * wc,
            fmt("max |bessel - quadrature| = %.2e g wc on n <= 20, wc t in [0, 50] step 0.25 (tol 1e-8)", worst)};
}

// 3 --------------------------------------------------------------------------------------------
Verdict maxima_fit() {
    std::vector<std::size_t> ns(39);
    std::iota(ns.begin(), ns.end(), 2);
    const auto fit = find_coupling_maxima(ns, 1.0, 1.0);
    const bool slope_ok = fit.slope >= 2.00 && fit.slope <= 2.10;
    const bool icpt_ok = fit.intercept >= 1.7 && fit.intercept <= 2.0;

    std::vector<std::size_t> all(101);
    std::iota(all.begin(), all.end(), 0);
    const auto wide = find_coupling_maxima(all, 1.0, 1.0);
    info("maxima fit over n = 0..100 with 1-based mode labels: slope %.5f, intercept %.5f (target 2.05123, 1.85029)",
         wide.slope, wide.intercept - wide.slope);

    char buf[200];
    std::snprintf(buf, sizeof(buf), "slope %.5f (%s [2.00, 2.10]), intercept %.5f (%s [1.7, 2.0]) for n in [2, 40]",
                  fit.slope, slope_ok ? "in" : "outside", fit.intercept, icpt_ok ? "in" : "outside");
    return {slope_ok && icpt_ok, buf};
}

// 4 --------------------------------------------------------------------------------------------
Verdict sampling_bound_check() {
    const double wc = 1.0;
    const double zero = sampling_bound(0.1, wc, std::numbers::pi / wc);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> dt_dist(std::numbers::pi / wc, 10.0);
    std::uniform_real_distribution<double> tau_dist(-50.0, 50.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double dt = dt_dist(rng);
        const double tau = tau_dist(rng);
        worst = std::max(worst, std::abs(delta_C(0.1, wc, dt, tau) - delta_C_quadrature(0.1, wc, dt, tau)));
    }
    char buf[200];
    std::snprintf(buf, sizeof(buf), "bound at dt = pi/wc is %g; max |closed form - quadrature| = %.2e on 100 points (tol 1e-8)",
                  zero, worst);
    return {zero == 0.0 && worst <= 1e-8, buf};
}

// 5 --------------------------------------------------------------------------------------------
CVector random_vector(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    CVector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(nd(rng), nd(rng));
    return v.normalized();
}

CMatrix random_unitary(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    CMatrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = cplx(nd(rng), nd(rng));
    return Eigen::HouseholderQR<CMatrix>(a).householderQ();
}

// Dense gate application, site 0 most significant
void dense_apply(CVector& psi, std::vector<std::size_t>& dims, const TwoSiteGate& g) {
    std::size_t left = 1;
    for (std::size_t k = 0; k < g.site; ++k) left *= dims[k];
    std::size_t right = 1;
    for (std::size_t k = g.site + 2; k < dims.size(); ++k) right *= dims[k];
    const std::size_t d12 = dims[g.site] * dims[g.site + 1];
    const std::size_t o1 = g.out_d1 ? g.out_d1 : dims[g.site];
    const std::size_t o2 = g.out_d2 ? g.out_d2 : dims[g.site + 1];
    CVector out = CVector::Zero(static_cast<Eigen::Index>(left * o1 * o2 * right));
    for (std::size_t l = 0; l < left; ++l)
        for (std::size_t t = 0; t < o1 * o2; ++t)
            for (std::size_t s = 0; s < d12; ++s)
                for (std::size_t r = 0; r < right; ++r)
                    out((l * o1 * o2 + t) * right + r) += g.matrix(t, s) * psi((l * d12 + s) * right + r);
    psi = out;
    dims[g.site] = o1;
    dims[g.site + 1] = o2;
}

Verdict mps_oracle() {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> n_sites(2, 6);
    std::uniform_int_distribution<std::size_t> dim(1, 4);
    std::uniform_int_distribution<std::size_t> n_gates(1, 20);
    std::bernoulli_distribution coin(0.5);
    double worst_state = 0.0;
    double worst_drift = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t L = n_sites(rng);
        std::vector<CVector> locals;
        for (std::size_t k = 0; k < L; ++k) locals.push_back(random_vector(dim(rng), rng));
        auto mps = MPSState::product(locals);
        CVector psi = mps.to_dense();
        std::vector<std::size_t> dims = mps.local_dims();
        const std::size_t G = n_gates(rng);
        for (std::size_t q = 0; q < G; ++q) {
            const std::size_t site = std::uniform_int_distribution<std::size_t>(0, L - 2)(rng);
            const std::size_t d1 = dims[site];
            const std::size_t d2 = dims[site + 1];
            const CMatrix u = random_unitary(d1 * d2, rng);
            const TwoSiteGate gate = coin(rng) ? fused_swap_gate(site, d1, d2, u) : TwoSiteGate{site, u, 0, 0};
            const double before = mps.norm();
            mps.apply_gate(gate, TruncationPolicy::unbounded(), coin(rng) ? CenterMove::Right : CenterMove::Left);
            dense_apply(psi, dims, gate);
            worst_drift = std::max(worst_drift, std::abs(mps.norm() - before));
        }
        worst_state = std::max(worst_state, (mps.to_dense() - psi).norm());
    }
    char buf[200];
    std::snprintf(buf, sizeof(buf), "max state error %.2e (tol 1e-8), max norm drift per gate %.2e (tol 1e-10)",
                  worst_state, worst_drift);
    return {worst_state <= 1e-8 && worst_drift < 1e-10, buf};
}

// 6 --------------------------------------------------------------------------------------------
double interpolate(const TimeSeries& ref, double t) {
    auto it = std::lower_bound(ref.times.begin(), ref.times.end(), t);
    if (it == ref.times.begin()) return ref.values.front();
    if (it == ref.times.end()) return ref.values.back();
    const std::size_t i = static_cast<std::size_t>(it - ref.times.begin());
    const double w = (t - ref.times[i - 1]) / (ref.times[i] - ref.times[i - 1]);
    return (1.0 - w) * ref.values[i - 1] + w * ref.values[i];
}

double mean_signed_difference(const TimeSeries& run, const TimeSeries& ref) {
    double sum = 0.0;
    for (std::size_t i = 0; i < run.times.size(); ++i) sum += run.values[i] - interpolate(ref, run.times[i]);
    return sum / static_cast<double>(run.times.size());
}

// Errors shrink with dt and every trajectory sits above the reference on average.
bool converges_from_above(const std::vector<double>& dts, const std::vector<double>& errors,
                          const std::vector<double>& signed_diff) {
    for (std::size_t i = 0; i < dts.size(); ++i) {
        if (signed_diff[i] < 0.0) return false;
        if (i > 0 && !(errors[i] > errors[i - 1])) return false;
    }
    return true;
}

Verdict error_scaling_sweep() {
    SpinBosonConfig base;
    base.omega_0 = 0.2;
    base.delta = 0.0;
    base.alpha = 0.1;
    base.omega_c = 1.0;
    base.horizon = 35.0;
    base.local_dim = 6;

    SpinBosonConfig ref_cfg = base;
    ref_cfg.representation = Representation::Tedopa;
    ref_cfg.n_modes = 16;
    ref_cfg.dt = 0.1;
    ref_cfg.policy.max_bond = 32;
    auto t0 = Clock::now();
    const TimeSeries reference = run(ref_cfg);
    const double ref_secs = seconds_since(t0);
    info("reference: TEDOPA, 16 modes, D 32, dt 0.1: %.1f s, final <sigma_z> %.5f, discarded weight %.2e", ref_secs,
         reference.values.back(), reference.discarded_weight.back());

    const std::vector<double> dts{0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0};
    std::vector<TimeSeries> runs;
    std::vector<double> run_secs;
    std::vector<double> signed_diff;
    for (double dt : dts) {
        SpinBosonConfig c = base;
        c.representation = Representation::CollisionNonMarkovian;
        c.dt = dt;
        c.policy.max_bond = 32;
        t0 = Clock::now();
        runs.push_back(run(c));
        run_secs.push_back(seconds_since(t0));
        signed_diff.push_back(mean_signed_difference(runs.back(), reference));
    }
    const ErrorReport rep = analyze(runs, reference, base.alpha, base.omega_c);
    for (std::size_t i = 0; i < dts.size(); ++i) {
        info("dt %.2f: avg error %.4e, steady error %.4e, mean signed diff %+.3e, bound %.4f, sites %zu, %.1f s",
             dts[i], rep.avg_errors[i], rep.steady_errors[i], signed_diff[i], rep.bound_values[i], runs[i].ancillae,
             run_secs[i]);
    }
    for (std::size_t i = 1; i < dts.size(); ++i) {
        info("local slope dt %.2f -> %.2f: %.3f", dts[i - 1], dts[i],
             std::log(rep.avg_errors[i] / rep.avg_errors[i - 1]) / std::log(dts[i] / dts[i - 1]));
    }
    const RegimeFit& fit = rep.fit;
    info("fit: threshold %s %.2f, slope below %.3f, slope above %.3f, plateau %.4f, points used %zu/%zu",
         fit.threshold_found ? "found at" : "not found,", fit.threshold_dt, fit.slope_below, fit.slope_above,
         rep.plateau, static_cast<std::size_t>(std::count(fit.used.begin(), fit.used.end(), true)), fit.used.size());

    const bool a = converges_from_above(dts, rep.avg_errors, signed_diff);
    // one grid step either side of 2/wc
    const bool b = fit.threshold_found && fit.threshold_dt > 1.5 - 1e-9 && fit.threshold_dt < 3.0 + 1e-9;
    const bool c = fit.threshold_found && fit.slope_above >= 1.7 && fit.slope_above <= 2.3 &&
                   fit.slope_below >= 2.3 && fit.slope_below <= 3.2;
    bool d = true;
    for (std::size_t i = 0; i < dts.size(); ++i) {
        if (dts[i] > std::numbers::pi / base.omega_c && rep.avg_errors[i] > rep.bound_values[i]) d = false;
    }

    // Reduced sweep {4, 2, 1}: reference plus three runs
    const std::vector<std::size_t> reduced{2, 4, 6};
    double reduced_secs = ref_secs;
    std::vector<double> r_dts, r_err, r_sig;
    for (std::size_t i : reduced) {
        reduced_secs += run_secs[i];
        r_dts.push_back(dts[i]);
        r_err.push_back(rep.avg_errors[i]);
        r_sig.push_back(signed_diff[i]);
    }
    const bool ra = converges_from_above(r_dts, r_err, r_sig);
    const bool r_time = reduced_secs < 900.0;
    const RegimeFit rfit = fit_regimes(r_dts, r_err);
    info("reduced sweep {4, 2, 1}: %.1f s (limit 900 s), (a) %s, threshold %s (three points cannot carry two "
         "segments)", reduced_secs, ra ? "holds" : "fails", rfit.threshold_found ? "found" : "not resolvable");

    char buf[300];
    std::snprintf(buf, sizeof(buf), "(a) %s, (b) %s, (c) %s, (d) %s, reduced sweep time %s, reduced (a) %s",
                  a ? "pass" : "fail", b ? "pass" : "fail", c ? "pass" : "fail", d ? "pass" : "fail",
                  r_time ? "pass" : "fail", ra ? "pass" : "fail");
    return {a && b && c && d && r_time && ra, buf};
}

// 7 --------------------------------------------------------------------------------------------
Verdict equivalence_sanity() {
    SpinBosonConfig cfg;
    cfg.bath = BathKind::Flat;
    cfg.alpha = 0.02;
    cfg.omega_0 = 0.2;
    cfg.delta = 0.0;
    cfg.omega_c = 1.0;
    cfg.horizon = 35.0;
    cfg.local_dim = 6;
    cfg.dt = std::numbers::pi / cfg.omega_c;

    const std::size_t steps = collision_steps(cfg);
    ChainKernelOptions opts;
    opts.mode_spacing = cfg.dt;
    opts.mode_offset = 0.5;
    opts.first_mode = -static_cast<long>(steps);
    const auto kernel = kernel_chain(bath_density(cfg), cfg.dt, steps, 3 * steps, opts);
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index m = 0; m < kernel.W.rows(); ++m) {
        const double diag = std::abs(kernel.W(m, m + static_cast<Eigen::Index>(steps)));
        const double off = kernel.W.row(m).cwiseAbs().sum() - diag;
        worst_ratio = std::min(worst_ratio, diag / off);
    }
    const bool dominant = worst_ratio > 1.0;
    info("flat kernel at dt = pi/wc: min over rows of |W_mm| / sum_{n != m} |W_mn| = %.3f with %zu ancillae",
         worst_ratio, kernel.ancillae());

    SpinBosonConfig mk = cfg;
    mk.representation = Representation::CollisionMarkovian;
    SpinBosonConfig nm = cfg;
    nm.representation = Representation::CollisionNonMarkovian;
    nm.window_mode = WindowMode::Diagonal;
    const TimeSeries a = run(mk);
    const TimeSeries b = run(nm);
    const double err = error_metrics(a, b).avg_error;
    info("final <sigma_z>: markovian %.5f, diagonal-window non-markovian %.5f", a.values.back(), b.values.back());

    char buf[200];
    std::snprintf(buf, sizeof(buf), "diagonally dominant: %s; markovian vs diagonal window avg error %.3e (tol 5e-3)",
                  dominant ? "yes" : "no", err);
    return {dominant && err <= 5e-3, buf};
}

}  // namespace

int main(int argc, char** argv) {
    bool strict = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--strict") == 0) {
            strict = true;
        } else {
            std::fprintf(stderr, "usage: %s [--strict]\n", argv[0]);
            return 2;
        }
    }
    try {
        report(1, "chain-coefficient closed forms", 1.0, chain_closed_forms);
        report(2, "coupling oracle equivalence", 30.0, coupling_oracle);
        report(3, "coupling maxima fit", 10.0, maxima_fit);
        report(4, "sampling bound", 5.0, sampling_bound_check);
        report(5, "MPS engine oracle", 60.0, mps_oracle);
        report(6, "error-scaling reproduction", 3600.0, error_scaling_sweep);
        report(7, "equivalence sanity", 600.0, equivalence_sanity);
    } catch (const std::exception& e) {
        std::printf("ERROR acceptance aborted: %s\n", e.what());
        return 2;
    }
    std::printf("SUMMARY %d of 7 criteria failed\n", g_failed);
    return strict && g_failed > 0 ? 1 : 0;
}
