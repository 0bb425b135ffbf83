// output.hpp: CSV/JSON writers with write-then-rename semantics, and the TimeSeries CSV reader

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "colchain/analysis.hpp"
#include "colchain/models.hpp"

namespace colchain::cli {

// Shortest text that parses back to the same double.
std::string format_double(double x);

// Writes to a sibling temporary file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    CsvWriter& cell(double x);
    CsvWriter& cell(long long x);
    CsvWriter& cell(std::size_t x) { return cell(static_cast<long long>(x)); }
    CsvWriter& cell(const std::string& s);
    void end_row();

    std::size_t rows() const noexcept { return rows_; }
    const std::string& text() const noexcept { return text_; }
    void save(const std::filesystem::path& path) const { write_atomic(path, text_); }

private:
    void separator();

    std::size_t columns_;
    std::size_t in_row_{0};
    std::size_t rows_{0};
    std::string text_;
};

// Sidecar layout: {schema_version, config, metrics, warnings}
nlohmann::json sidecar(const nlohmann::json& config, const nlohmann::json& metrics,
                       const std::vector<std::string>& warnings = {});
void save_json(const std::filesystem::path& path, const nlohmann::json& j);

// Columns t, sigma_z, discarded_weight, max_bond
CsvWriter timeseries_csv(const TimeSeries& ts);

// Reads the first two columns (t, sigma_z) of a TimeSeries CSV.
TimeSeries read_timeseries_csv(const std::filesystem::path& path);

nlohmann::json regime_fit_json(const RegimeFit& fit);
CsvWriter error_report_csv(const ErrorReport& report);
nlohmann::json error_report_json(const ErrorReport& report);

}  // namespace colchain::cli
