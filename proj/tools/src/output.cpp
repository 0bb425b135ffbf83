#include "colchain_cli/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "colchain/errors.hpp"
#include "colchain_cli/run_config.hpp"

namespace colchain::cli {

using nlohmann::json;

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << contents;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) text_ += ',';
        text_ += header[i];
    }
    text_ += '\n';
}

void CsvWriter::separator() {
    if (in_row_ >= columns_) throw StructuralError("CSV row has more cells than the header");
    if (in_row_ > 0) text_ += ',';
    ++in_row_;
}

CsvWriter& CsvWriter::cell(double x) {
    separator();
    text_ += format_double(x);
    return *this;
}

CsvWriter& CsvWriter::cell(long long x) {
    separator();
    text_ += std::to_string(x);
    return *this;
}

CsvWriter& CsvWriter::cell(const std::string& s) {
    separator();
    text_ += s;
    return *this;
}

void CsvWriter::end_row() {
    if (in_row_ != columns_) throw StructuralError("CSV row has fewer cells than the header");
    text_ += '\n';
    in_row_ = 0;
    ++rows_;
}

json sidecar(const json& config, const json& metrics, const std::vector<std::string>& warnings) {
    return {{"schema_version", kSchemaVersion}, {"config", config}, {"metrics", metrics}, {"warnings", warnings}};
}

void save_json(const std::filesystem::path& path, const json& j) { write_atomic(path, j.dump(2) + "\n"); }

CsvWriter timeseries_csv(const TimeSeries& ts) {
    CsvWriter csv({"t", "sigma_z", "discarded_weight", "max_bond"});
    for (std::size_t i = 0; i < ts.times.size(); ++i) {
        csv.cell(ts.times[i]).cell(ts.values[i]).cell(ts.discarded_weight[i]).cell(ts.max_bond[i]);
        csv.end_row();
    }
    return csv;
}

TimeSeries read_timeseries_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open time series " + path.string());
    TimeSeries ts;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (row == 1) continue;  // header
        if (line.empty() || line == "\r") continue;
        std::stringstream ss(line);
        std::string a;
        std::string b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',')) throw ParseError("expected t,sigma_z", row);
        try {
            std::size_t used_a = 0;
            std::size_t used_b = 0;
            const double t = std::stod(a, &used_a);
            const double v = std::stod(b, &used_b);
            if (used_a != a.size() || (used_b != b.size() && b.substr(used_b) != "\r")) {
                throw ParseError("trailing characters", row);
            }
            ts.times.push_back(t);
            ts.values.push_back(v);
        } catch (const std::logic_error&) {
            throw ParseError("non-numeric value", row);
        }
    }
    ts.discarded_weight.assign(ts.times.size(), 0.0);
    ts.max_bond.assign(ts.times.size(), 0);
    return ts;
}

json regime_fit_json(const RegimeFit& fit) {
    auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
    return {{"slope_below", num(fit.slope_below)},
            {"slope_above", num(fit.slope_above)},
            {"intercept_below_log10", num(fit.intercept_below)},
            {"intercept_above_log10", num(fit.intercept_above)},
            {"threshold_dt", fit.threshold_found ? num(fit.threshold_dt) : json(nullptr)},
            {"threshold_found", fit.threshold_found},
            {"single_regime", fit.single_regime},
            {"degenerate", fit.degenerate},
            {"used", fit.used}};
}

CsvWriter error_report_csv(const ErrorReport& report) {
    CsvWriter csv({"dt", "avg_error", "steady_error", "sampling_bound", "used_in_fit"});
    for (std::size_t i = 0; i < report.dt_values.size(); ++i) {
        const bool used = i < report.fit.used.size() && report.fit.used[i];
        csv.cell(report.dt_values[i])
            .cell(report.avg_errors[i])
            .cell(report.steady_errors[i])
            .cell(report.bound_values[i])
            .cell(static_cast<long long>(used));
        csv.end_row();
    }
    return csv;
}

json error_report_json(const ErrorReport& report) {
    return {{"dt_values", report.dt_values},
            {"avg_errors", report.avg_errors},
            {"steady_errors", report.steady_errors},
            {"bound_values", report.bound_values},
            {"plateau", report.plateau},
            {"avg_fit", regime_fit_json(report.fit)},
            {"steady_fit", regime_fit_json(report.steady_fit)}};
}

}  // namespace colchain::cli
