#include "colchain_cli/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "colchain/errors.hpp"

namespace colchain::cli {

using nlohmann::json;

namespace {

// Reject keys outside `allowed` so that typos do not silently fall back to defaults.
void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError("'" + where + "' must be a JSON object");
    const std::set<std::string> names(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items()) {
        if (!names.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

void read_model(const json& j, SpinBosonConfig& m) {
    check_keys(j, "model",
               {"omega_0", "delta", "alpha", "omega_c", "g", "bath", "n_modes", "local_dim", "max_bond",
                "svd_cutoff", "dt", "horizon", "representation", "window_threshold", "window_mode", "kernel",
                "tail_length", "tail_tolerance"});
    read(j, "omega_0", m.omega_0);
    read(j, "delta", m.delta);
    read(j, "alpha", m.alpha);
    read(j, "omega_c", m.omega_c);
    read(j, "g", m.g);
    read(j, "n_modes", m.n_modes);
    read(j, "local_dim", m.local_dim);
    read(j, "max_bond", m.policy.max_bond);
    read(j, "svd_cutoff", m.policy.svd_cutoff);
    read(j, "dt", m.dt);
    read(j, "horizon", m.horizon);
    read(j, "window_threshold", m.window_threshold);
    read(j, "tail_length", m.tail_length);
    read(j, "tail_tolerance", m.tail_tolerance);
    std::string name;
    if (j.contains("bath")) {
        read(j, "bath", name);
        m.bath = bath_kind_from_string(name);
    }
    if (j.contains("representation")) {
        read(j, "representation", name);
        m.representation = representation_from_string(name);
    }
    if (j.contains("window_mode")) {
        read(j, "window_mode", name);
        m.window_mode = window_mode_from_string(name);
    }
    if (j.contains("kernel")) {
        read(j, "kernel", name);
        m.kernel = kernel_variant_from_string(name);
    }
}

json model_json(const SpinBosonConfig& m) {
    return {{"omega_0", m.omega_0},
            {"delta", m.delta},
            {"alpha", m.alpha},
            {"omega_c", m.omega_c},
            {"g", m.g},
            {"bath", to_string(m.bath)},
            {"n_modes", m.n_modes},
            {"local_dim", m.local_dim},
            {"max_bond", m.policy.max_bond},
            {"svd_cutoff", m.policy.svd_cutoff},
            {"dt", m.dt},
            {"horizon", m.horizon},
            {"representation", to_string(m.representation)},
            {"window_threshold", m.window_threshold},
            {"window_mode", to_string(m.window_mode)},
            {"kernel", to_string(m.kernel)},
            {"tail_length", m.tail_length},
            {"tail_tolerance", m.tail_tolerance}};
}

}  // namespace

void RunConfig::validate() const {
    if (schema_version != kSchemaVersion) {
        throw ConfigError("unsupported schema_version " + std::to_string(schema_version) + " (expected " +
                          std::to_string(kSchemaVersion) + ")");
    }
    model.validate();
    if (!spectral.kind.empty() && spectral.kind != "flat" && spectral.kind != "ohmic" &&
        spectral.kind != "tabulated") {
        throw ConfigError("unknown spectral_density.kind '" + spectral.kind + "'");
    }
    if (spectral.kind == "tabulated" && spectral.file.empty()) {
        throw ConfigError("tabulated spectral density needs spectral_density.file");
    }
    if (chain.method != "stieltjes" && chain.method != "lanczos") {
        throw ConfigError("chain.method must be 'stieltjes' or 'lanczos'");
    }
    if (!(couplings.t_step > 0.0) || !(couplings.t_max >= 0.0)) {
        throw ConfigError("couplings.t_step must be positive and couplings.t_max nonnegative");
    }
    if (couplings.fit_n_min > couplings.fit_n_max) throw ConfigError("couplings.fit_n_min exceeds fit_n_max");
    if (kernel.steps < 1) throw ConfigError("kernel.steps must be at least 1");
    if (!std::is_sorted(sweep.dt_values.begin(), sweep.dt_values.end())) {
        throw ConfigError("sweep.dt_values must be sorted ascending");
    }
    for (double dt : sweep.dt_values) {
        if (!(dt > 0.0)) throw ConfigError("sweep.dt_values must be positive");
    }
    if (!(sweep.reference_dt > 0.0)) throw ConfigError("sweep.reference_dt must be positive");
    if (sweep.reference_max_bond < 1) throw ConfigError("sweep.reference_max_bond must be at least 1");
    if (sweep.synthetic.enabled && !(sweep.synthetic.noise >= 0.0)) {
        throw ConfigError("sweep.synthetic.noise must be nonnegative");
    }
    if (jobs < 1) throw ConfigError("jobs must be at least 1");
    if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

RunConfig parse_config(const json& j) {
    check_keys(j, "config",
               {"schema_version", "model", "spectral_density", "chain", "couplings", "kernel", "sweep", "analyze",
                "output_dir", "seed", "jobs"});
    RunConfig c;
    if (!j.contains("schema_version")) throw ConfigError("config is missing schema_version");
    read(j, "schema_version", c.schema_version);
    if (j.contains("model")) read_model(j.at("model"), c.model);
    if (j.contains("spectral_density")) {
        const json& s = j.at("spectral_density");
        check_keys(s, "spectral_density", {"kind", "file"});
        read(s, "kind", c.spectral.kind);
        read(s, "file", c.spectral.file);
    }
    if (j.contains("chain")) {
        const json& s = j.at("chain");
        check_keys(s, "chain", {"n_modes", "quad_points", "method"});
        read(s, "n_modes", c.chain.n_modes);
        read(s, "quad_points", c.chain.quad_points);
        read(s, "method", c.chain.method);
    }
    if (j.contains("couplings")) {
        const json& s = j.at("couplings");
        check_keys(s, "couplings", {"n_max", "t_max", "t_step", "method", "fit_n_min", "fit_n_max"});
        read(s, "n_max", c.couplings.n_max);
        read(s, "t_max", c.couplings.t_max);
        read(s, "t_step", c.couplings.t_step);
        read(s, "fit_n_min", c.couplings.fit_n_min);
        read(s, "fit_n_max", c.couplings.fit_n_max);
        if (s.contains("method")) {
            std::string name;
            read(s, "method", name);
            c.couplings.method = coupling_method_from_string(name);
        }
    }
    if (j.contains("kernel")) {
        const json& s = j.at("kernel");
        check_keys(s, "kernel", {"steps", "variant"});
        read(s, "steps", c.kernel.steps);
        if (s.contains("variant")) {
            std::string name;
            read(s, "variant", name);
            c.kernel.variant = kernel_variant_from_string(name);
        }
    }
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        check_keys(s, "sweep", {"dt_values", "reference_dt", "reference_max_bond", "synthetic"});
        read(s, "dt_values", c.sweep.dt_values);
        read(s, "reference_dt", c.sweep.reference_dt);
        read(s, "reference_max_bond", c.sweep.reference_max_bond);
        if (s.contains("synthetic")) {
            const json& y = s.at("synthetic");
            check_keys(y, "sweep.synthetic", {"enabled", "threshold", "p_below", "p_above", "noise"});
            read(y, "enabled", c.sweep.synthetic.enabled);
            read(y, "threshold", c.sweep.synthetic.threshold);
            read(y, "p_below", c.sweep.synthetic.p_below);
            read(y, "p_above", c.sweep.synthetic.p_above);
            read(y, "noise", c.sweep.synthetic.noise);
        }
    }
    if (j.contains("analyze")) {
        const json& s = j.at("analyze");
        check_keys(s, "analyze", {"reference", "runs"});
        read(s, "reference", c.analyze.reference);
        if (s.contains("runs")) {
            if (!s.at("runs").is_array()) throw ConfigError("analyze.runs must be an array");
            for (const json& r : s.at("runs")) {
                check_keys(r, "analyze.runs[]", {"dt", "file"});
                AnalyzeRun run;
                read(r, "dt", run.dt);
                read(r, "file", run.file);
                c.analyze.runs.push_back(run);
            }
        }
    }
    read(j, "output_dir", c.output_dir);
    read(j, "seed", c.seed);
    read(j, "jobs", c.jobs);
    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

json to_json(const RunConfig& c) {
    json runs = json::array();
    for (const auto& r : c.analyze.runs) runs.push_back({{"dt", r.dt}, {"file", r.file}});
    return {{"schema_version", c.schema_version},
            {"model", model_json(c.model)},
            {"spectral_density", {{"kind", c.spectral.kind}, {"file", c.spectral.file}}},
            {"chain", {{"n_modes", c.chain.n_modes}, {"quad_points", c.chain.quad_points}, {"method", c.chain.method}}},
            {"couplings",
             {{"n_max", c.couplings.n_max},
              {"t_max", c.couplings.t_max},
              {"t_step", c.couplings.t_step},
              {"method", to_string(c.couplings.method)},
              {"fit_n_min", c.couplings.fit_n_min},
              {"fit_n_max", c.couplings.fit_n_max}}},
            {"kernel", {{"steps", c.kernel.steps}, {"variant", to_string(c.kernel.variant)}}},
            {"sweep",
             {{"dt_values", c.sweep.dt_values},
              {"reference_dt", c.sweep.reference_dt},
              {"reference_max_bond", c.sweep.reference_max_bond},
              {"synthetic",
               {{"enabled", c.sweep.synthetic.enabled},
                {"threshold", c.sweep.synthetic.threshold},
                {"p_below", c.sweep.synthetic.p_below},
                {"p_above", c.sweep.synthetic.p_above},
                {"noise", c.sweep.synthetic.noise}}}}},
            {"analyze", {{"reference", c.analyze.reference}, {"runs", runs}}},
            {"output_dir", c.output_dir},
            {"seed", c.seed},
            {"jobs", c.jobs}};
}

SpectralDensity spectral_density(const RunConfig& c) {
    const std::string& kind = c.spectral.kind;
    if (kind.empty()) return bath_density(c.model);
    if (kind == "tabulated") return load_tabulated(c.spectral.file, c.model.g);
    if (kind == "flat") return SpectralDensity::flat(c.model.omega_c, c.model.g);
    return SpectralDensity::ohmic(c.model.alpha, c.model.omega_c, c.model.g);
}

}  // namespace colchain::cli
