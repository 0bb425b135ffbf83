#include "colchain_cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <thread>

#include "colchain/analysis.hpp"
#include "colchain/collision.hpp"
#include "colchain/couplings.hpp"
#include "colchain/errors.hpp"
#include "colchain/orthopoly.hpp"
#include "colchain_cli/output.hpp"

namespace colchain::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path out_path(const RunConfig& cfg, const std::string& name) { return fs::path(cfg.output_dir) / name; }

std::vector<std::string> run_assumptions() {
    return {"initial state: spin up (sigma_z = +1) times the bath vacuum",
            "observable: <sigma_z>(t) sampled after every time step"};
}

std::string dt_tag(double dt) {
    std::string s = format_double(dt);
    std::replace(s.begin(), s.end(), '.', 'p');
    return s;
}

json series_metrics(const TimeSeries& ts) {
    return {{"samples", ts.times.size()},
            {"final_sigma_z", ts.values.empty() ? json(nullptr) : json(ts.values.back())},
            {"discarded_weight", ts.discarded_weight.empty() ? 0.0 : ts.discarded_weight.back()},
            {"max_bond", ts.max_bond.empty() ? 0 : ts.max_bond.back()},
            {"bath_sites", ts.ancillae},
            {"assumptions", run_assumptions()}};
}

// Runs fn(i) for i in [0, count) on up to `jobs` threads; returns per-index error text.
template <typename Fn>
std::vector<std::string> parallel_for(std::size_t count, std::size_t jobs, Fn fn) {
    std::vector<std::string> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const std::size_t threads = std::min(std::max<std::size_t>(jobs, 1), std::max<std::size_t>(count, 1));
    std::vector<std::thread> pool;
    for (std::size_t k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return errors;
}

ErrorReport report_from(std::span<const TimeSeries> runs, const TimeSeries& reference, const RunConfig& cfg) {
    return analyze(runs, reference, cfg.model.alpha, cfg.model.omega_c);
}

void write_report(const RunConfig& cfg, const ErrorReport& report, const json& extra) {
    error_report_csv(report).save(out_path(cfg, "error_report.csv"));
    json metrics = error_report_json(report);
    for (const auto& [k, v] : extra.items()) metrics[k] = v;
    save_json(out_path(cfg, "error_report.json"), sidecar(to_json(cfg), metrics));
}

}  // namespace

int cmd_chain_coeffs(const RunConfig& cfg) {
    CsvWriter csv({"n", "epsilon", "t", "kappa"});
    const std::size_t N = cfg.chain.n_modes;
    json metrics = {{"n_modes", N}, {"method", cfg.chain.method}};
    if (N > 0) {
        const SpectralDensity sd = spectral_density(cfg);
        const std::size_t quad = std::max(cfg.chain.quad_points, 4 * N);
        const RecurrenceCoefficients rc =
            cfg.chain.method == "lanczos" ? lanczos_recurrence(sd, N, quad) : stieltjes_recurrence(sd, N, quad);
        const ChainCoefficients chain = chain_coefficients(rc);
        for (std::size_t n = 0; n < N; ++n) {
            csv.cell(n).cell(chain.epsilon[n]).cell(chain.t[n]).cell(chain.kappa);
            csv.end_row();
        }
        metrics["kappa"] = chain.kappa;
        metrics["quad_points"] = quad;
    }
    csv.save(out_path(cfg, "chain_coeffs.csv"));
    save_json(out_path(cfg, "chain_coeffs.json"), sidecar(to_json(cfg), metrics));
    return kOk;
}

int cmd_couplings(const RunConfig& cfg) {
    const auto& cc = cfg.couplings;
    std::vector<double> times;
    const auto samples = static_cast<std::size_t>(std::floor(cc.t_max / cc.t_step + 1e-9)) + 1;
    for (std::size_t k = 0; k < samples; ++k) times.push_back(static_cast<double>(k) * cc.t_step);

    CsvWriter csv({"n", "t", "abs_gamma"});
    if (cc.method == CouplingMethod::Bessel) {
        for (const auto& p : coupling_heatmap(cc.n_max, times, cfg.model.g, cfg.model.omega_c)) {
            csv.cell(p.n).cell(p.t).cell(p.magnitude);
            csv.end_row();
        }
    } else {
        const SpectralDensity sd = spectral_density(cfg);
        std::vector<CouplingTrajectory> traj(cc.n_max + 1);
        const auto errors = parallel_for(cc.n_max + 1, cfg.jobs, [&](std::size_t n) {
            traj[n] = coupling_trajectory(sd, cc.method, n, times);
        });
        for (std::size_t n = 0; n <= cc.n_max; ++n) {
            if (!errors[n].empty()) throw std::runtime_error("coupling n=" + std::to_string(n) + ": " + errors[n]);
            for (std::size_t k = 0; k < times.size(); ++k) {
                csv.cell(n).cell(times[k]).cell(std::abs(traj[n].values[k]));
                csv.end_row();
            }
        }
    }
    csv.save(out_path(cfg, "couplings_heatmap.csv"));

    std::vector<std::size_t> ns(cc.fit_n_max - cc.fit_n_min + 1);
    std::iota(ns.begin(), ns.end(), cc.fit_n_min);
    const MaximaFit fit = find_coupling_maxima(ns, cfg.model.g, cfg.model.omega_c);
    auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
    const json metrics = {{"n_values", fit.n_values},
                          {"t_max", fit.t_max},
                          {"slope", num(fit.slope)},
                          {"intercept", num(fit.intercept)},
                          {"degenerate", fit.degenerate},
                          {"method", to_string(cc.method)}};
    save_json(out_path(cfg, "couplings_maxima.json"), sidecar(to_json(cfg), metrics));
    return kOk;
}

int cmd_kernel(const RunConfig& cfg) {
    const SpectralDensity sd = spectral_density(cfg);
    const std::size_t steps = cfg.kernel.steps;
    CollisionKernel k;
    if (cfg.kernel.variant == KernelVariant::Chain) {
        ChainKernelOptions opts;
        opts.mode_spacing = cfg.model.dt;
        opts.mode_offset = 0.5;
        opts.window_threshold = cfg.model.window_threshold;
        k = kernel_chain(sd, cfg.model.dt, steps, steps, opts);
    } else {
        k = kernel_timebin(sd, cfg.model.dt, steps, cfg.model.window_threshold);
    }
    CsvWriter w({"step", "ancilla", "re", "im", "abs"});
    for (Eigen::Index m = 0; m < k.W.rows(); ++m) {
        for (Eigen::Index n = 0; n < k.W.cols(); ++n) {
            const auto v = k.W(m, n);
            w.cell(static_cast<long long>(m))
                .cell(static_cast<long long>(k.first_mode + n))
                .cell(v.real())
                .cell(v.imag())
                .cell(std::abs(v));
            w.end_row();
        }
    }
    w.save(out_path(cfg, "kernel.csv"));
    CsvWriter win({"step", "first", "last", "width"});
    for (std::size_t m = 0; m < k.window.size(); ++m) {
        const auto& r = k.window[m];
        win.cell(m)
            .cell(static_cast<long long>(k.first_mode) + static_cast<long long>(r.first))
            .cell(static_cast<long long>(k.first_mode) + static_cast<long long>(r.last))
            .cell(r.width());
        win.end_row();
    }
    win.save(out_path(cfg, "kernel_window.csv"));
    const json metrics = {{"variant", to_string(k.variant)},
                          {"dt", k.dt},
                          {"mode_spacing", k.mode_spacing},
                          {"mode_offset", k.mode_offset},
                          {"steps", k.W.rows()},
                          {"ancillae", k.W.cols()}};
    save_json(out_path(cfg, "kernel.json"), sidecar(to_json(cfg), metrics));
    return kOk;
}

int cmd_simulate(const RunConfig& cfg) {
    const TimeSeries ts = run(cfg.model);
    for (const auto& w : ts.warnings) std::cerr << "warning: " << w << "\n";
    timeseries_csv(ts).save(out_path(cfg, "timeseries.csv"));
    save_json(out_path(cfg, "timeseries.json"), sidecar(to_json(cfg), series_metrics(ts), ts.warnings));
    return kOk;
}

int cmd_sweep(const RunConfig& cfg) {
    const auto& dts = cfg.sweep.dt_values;
    if (cfg.sweep.synthetic.enabled) {
        const auto& s = cfg.sweep.synthetic;
        ErrorReport report;
        report.dt_values = dts;
        report.avg_errors = synthetic_errors(dts, s.threshold, s.p_below, s.p_above, s.noise, cfg.seed);
        report.steady_errors = report.avg_errors;
        for (double dt : dts) report.bound_values.push_back(sampling_bound(cfg.model.alpha, cfg.model.omega_c, dt));
        if (dts.size() >= 2 * RegimeFitOptions{}.min_points - 1) {
            report.fit = fit_regimes(report.dt_values, report.avg_errors);
            report.steady_fit = report.fit;
        } else {
            report.fit.degenerate = report.steady_fit.degenerate = true;
        }
        write_report(cfg, report, {{"synthetic", true}, {"planted_threshold", s.threshold},
                                   {"planted_p_below", s.p_below}, {"planted_p_above", s.p_above}});
        return kOk;
    }

    SpinBosonConfig ref_cfg = cfg.model;
    ref_cfg.representation = Representation::Tedopa;
    ref_cfg.dt = cfg.sweep.reference_dt;
    ref_cfg.policy.max_bond = cfg.sweep.reference_max_bond;
    std::cerr << "sweep: reference run (dt " << ref_cfg.dt << ")\n";
    const TimeSeries reference = run(ref_cfg);
    timeseries_csv(reference).save(out_path(cfg, "reference.csv"));

    std::vector<TimeSeries> runs(dts.size());
    const auto errors = parallel_for(dts.size(), cfg.jobs, [&](std::size_t i) {
        SpinBosonConfig c = cfg.model;
        c.representation = Representation::CollisionNonMarkovian;
        c.dt = dts[i];
        runs[i] = run(c);
        timeseries_csv(runs[i]).save(out_path(cfg, "run_dt_" + dt_tag(dts[i]) + ".csv"));
        std::cerr << "sweep: dt " << dts[i] << " done\n";
    });

    std::vector<TimeSeries> ok;
    json manifest_runs = json::array();
    json failed = json::array();
    std::vector<std::string> warnings = reference.warnings;
    for (std::size_t i = 0; i < dts.size(); ++i) {
        if (!errors[i].empty()) {
            failed.push_back({{"dt", dts[i]}, {"error", errors[i]}});
            std::cerr << "sweep: dt " << dts[i] << " failed: " << errors[i] << "\n";
            continue;
        }
        for (const auto& w : runs[i].warnings) warnings.push_back("dt " + format_double(dts[i]) + ": " + w);
        manifest_runs.push_back({{"dt", dts[i]}, {"file", "run_dt_" + dt_tag(dts[i]) + ".csv"}});
        ok.push_back(std::move(runs[i]));
    }

    const json manifest = {{"reference", "reference.csv"}, {"runs", manifest_runs}};
    save_json(out_path(cfg, "sweep.json"),
              sidecar(to_json(cfg), {{"manifest", manifest}, {"failed", failed}}, warnings));
    if (!ok.empty()) write_report(cfg, report_from(ok, reference, cfg), {{"failed", failed}});
    return failed.empty() ? kOk : kPartialFailure;
}

int cmd_analyze(const RunConfig& cfg) {
    AnalyzeConfig a = cfg.analyze;
    fs::path base;
    if (a.reference.empty()) {
        // Fall back to the manifest a previous sweep left in the output directory
        const fs::path manifest_path = out_path(cfg, "sweep.json");
        std::ifstream in(manifest_path);
        if (!in) throw ConfigError("analyze needs analyze.reference or " + manifest_path.string());
        const json side = json::parse(in);
        const json& m = side.at("metrics").at("manifest");
        a.reference = m.at("reference").get<std::string>();
        for (const auto& r : m.at("runs")) a.runs.push_back({r.at("dt").get<double>(), r.at("file").get<std::string>()});
        base = cfg.output_dir;
    }
    auto resolve = [&](const std::string& f) { return base.empty() || fs::path(f).is_absolute() ? fs::path(f) : base / f; };

    const TimeSeries reference = read_timeseries_csv(resolve(a.reference));
    std::vector<TimeSeries> runs;
    for (const auto& r : a.runs) {
        TimeSeries ts = read_timeseries_csv(resolve(r.file));
        ts.config = cfg.model;
        ts.config.dt = r.dt;
        runs.push_back(std::move(ts));
    }
    std::sort(runs.begin(), runs.end(), [](const TimeSeries& x, const TimeSeries& y) { return x.config.dt < y.config.dt; });
    write_report(cfg, report_from(runs, reference, cfg), json::object());
    return kOk;
}

}  // namespace colchain::cli
