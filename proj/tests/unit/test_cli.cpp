#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "colchain/errors.hpp"
#include "colchain_cli/commands.hpp"
#include "colchain_cli/output.hpp"
#include "colchain_cli/run_config.hpp"

using namespace colchain;
using namespace colchain::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("colchain_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

RunConfig small_config(const fs::path& out) {
    json j = {{"schema_version", 1},
              {"model",
               {{"omega_0", 0.2}, {"alpha", 0.05}, {"dt", 0.5}, {"horizon", 3.0}, {"n_modes", 6},
                {"local_dim", 3}, {"max_bond", 8}, {"representation", "collision_nonmarkovian"}}},
              {"output_dir", out.string()}};
    return parse_config(j);
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(COLCHAIN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST(Config, DefaultsAndRoundTrip) {
    const RunConfig a = parse_config({{"schema_version", 1}});
    EXPECT_EQ(a.chain.n_modes, 30u);
    EXPECT_EQ(a.sweep.dt_values.size(), 7u);
    const json first = to_json(a);
    const RunConfig b = parse_config(first);
    EXPECT_EQ(to_json(b), first);

    RunConfig c = small_config("x");
    EXPECT_EQ(to_json(parse_config(to_json(c))), to_json(c));
    EXPECT_EQ(c.model.representation, Representation::CollisionNonMarkovian);
}

TEST(Config, RejectsMalformedInput) {
    EXPECT_THROW(parse_config(json::object()), ConfigError);
    EXPECT_THROW(parse_config({{"schema_version", 2}}), ConfigError);
    EXPECT_THROW(parse_config({{"schema_version", 1}, {"modle", json::object()}}), ConfigError);
    EXPECT_THROW(parse_config({{"schema_version", 1}, {"model", {{"omega0", 1.0}}}}), ConfigError);
    EXPECT_THROW(parse_config({{"schema_version", 1}, {"model", {{"dt", "fast"}}}}), ConfigError);
    EXPECT_THROW(parse_config({{"schema_version", 1}, {"sweep", {{"dt_values", {2.0, 1.0}}}}}), ConfigError);
    EXPECT_THROW(parse_config({{"schema_version", 1}, {"chain", {{"method", "householder"}}}}), ConfigError);
    EXPECT_THROW(parse_config({{"schema_version", 1}, {"jobs", 0}}), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);

    const auto dir = scratch("badjson");
    std::ofstream(dir / "c.json") << "{ not json";
    EXPECT_THROW(load_config(dir / "c.json"), ConfigError);
}

TEST(Output, CsvWriterEnforcesColumns) {
    CsvWriter csv({"a", "b"});
    csv.cell(1.5).cell(std::string("x"));
    csv.end_row();
    EXPECT_EQ(csv.text(), "a,b\n1.5,x\n");
    csv.cell(1.0);
    EXPECT_THROW(csv.end_row(), StructuralError);
    csv.cell(2.0);
    EXPECT_THROW(csv.cell(3.0), StructuralError);
}

TEST(Output, FormatDoubleRoundTrips) {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) EXPECT_EQ(std::stod(format_double(x)), x);
    EXPECT_EQ(format_double(std::nan("")), "nan");
}

TEST(Output, TimeSeriesReadBackAndErrors) {
    const auto dir = scratch("ts");
    TimeSeries ts;
    ts.times = {0.0, 0.5};
    ts.values = {1.0, 0.25};
    ts.discarded_weight = {0.0, 1e-12};
    ts.max_bond = {1, 4};
    timeseries_csv(ts).save(dir / "ts.csv");
    EXPECT_FALSE(fs::exists(dir / "ts.csv.tmp"));
    const auto back = read_timeseries_csv(dir / "ts.csv");
    EXPECT_EQ(back.times, ts.times);
    EXPECT_EQ(back.values, ts.values);

    std::ofstream(dir / "bad.csv") << "t,sigma_z\n0,1\n0.5,oops\n";
    try {
        read_timeseries_csv(dir / "bad.csv");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.row(), 3u);
    }
}

TEST(Commands, ChainCoeffsWithZeroModesWritesHeaderOnly) {
    const auto dir = scratch("chain0");
    RunConfig cfg = parse_config({{"schema_version", 1}, {"chain", {{"n_modes", 0}}}, {"output_dir", dir.string()}});
    EXPECT_EQ(cmd_chain_coeffs(cfg), kOk);
    EXPECT_EQ(slurp(dir / "chain_coeffs.csv"), "n,epsilon,t,kappa\n");
    const json side = json::parse(slurp(dir / "chain_coeffs.json"));
    EXPECT_EQ(side.at("schema_version"), 1);
    EXPECT_TRUE(side.contains("config"));
    EXPECT_TRUE(side.contains("warnings"));
}

TEST(Commands, ChainCoeffsFlatValues) {
    const auto dir = scratch("chainflat");
    RunConfig cfg = parse_config({{"schema_version", 1},
                                  {"spectral_density", {{"kind", "flat"}}},
                                  {"chain", {{"n_modes", 4}}},
                                  {"output_dir", dir.string()}});
    ASSERT_EQ(cmd_chain_coeffs(cfg), kOk);
    std::ifstream in(dir / "chain_coeffs.csv");
    std::string line;
    std::getline(in, line);
    for (int n = 0; n < 4; ++n) {
        ASSERT_TRUE(std::getline(in, line));
        std::stringstream ss(line);
        std::string c[4];
        for (auto& s : c) std::getline(ss, s, ',');
        EXPECT_EQ(std::stoi(c[0]), n);
        EXPECT_NEAR(std::stod(c[1]), 0.5, 1e-10);
        EXPECT_NEAR(std::stod(c[2]), 0.5 * (n + 1.0) / std::sqrt((2.0 * n + 1.0) * (2.0 * n + 3.0)), 1e-10);
    }
}

TEST(Commands, KernelAndCouplingsOutputs) {
    const auto dir = scratch("kernel");
    RunConfig cfg = parse_config({{"schema_version", 1},
                                  {"model", {{"dt", 1.0}}},
                                  {"kernel", {{"steps", 4}}},
                                  {"couplings", {{"n_max", 3}, {"t_max", 2.0}, {"t_step", 0.5}, {"fit_n_max", 6}}},
                                  {"output_dir", dir.string()}});
    EXPECT_EQ(cmd_kernel(cfg), kOk);
    EXPECT_TRUE(fs::exists(dir / "kernel.csv"));
    EXPECT_TRUE(fs::exists(dir / "kernel_window.csv"));
    EXPECT_EQ(cmd_couplings(cfg), kOk);
    const std::string heat = slurp(dir / "couplings_heatmap.csv");
    EXPECT_EQ(std::count(heat.begin(), heat.end(), '\n'), 1 + 4 * 5);
    const json maxima = json::parse(slurp(dir / "couplings_maxima.json"));
    EXPECT_TRUE(maxima.at("metrics").contains("slope"));
}

TEST(Commands, SimulateIsDeterministic) {
    const auto d1 = scratch("sim1");
    const auto d2 = scratch("sim2");
    ASSERT_EQ(cmd_simulate(small_config(d1)), kOk);
    ASSERT_EQ(cmd_simulate(small_config(d2)), kOk);
    const std::string a = slurp(d1 / "timeseries.csv");
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(d2 / "timeseries.csv"));
}

TEST(Commands, SyntheticSweepRecoversThresholdAndIsSeeded) {
    auto make = [](const fs::path& d, int seed) {
        return parse_config({{"schema_version", 1},
                             {"sweep", {{"synthetic", {{"enabled", true}, {"noise", 0.02}}}}},
                             {"seed", seed},
                             {"output_dir", d.string()}});
    };
    const auto d1 = scratch("syn1");
    const auto d2 = scratch("syn2");
    ASSERT_EQ(cmd_sweep(make(d1, 5)), kOk);
    ASSERT_EQ(cmd_sweep(make(d2, 5)), kOk);
    EXPECT_EQ(slurp(d1 / "error_report.csv"), slurp(d2 / "error_report.csv"));
    const json rep = json::parse(slurp(d1 / "error_report.json"));
    EXPECT_TRUE(rep.at("metrics").at("avg_fit").at("threshold_found").get<bool>());
}

TEST(Commands, SweepThenAnalyzeFromManifest) {
    const auto dir = scratch("sweep");
    RunConfig cfg = parse_config({{"schema_version", 1},
                                  {"model",
                                   {{"omega_0", 0.2}, {"alpha", 0.05}, {"horizon", 3.0}, {"n_modes", 6},
                                    {"local_dim", 3}, {"max_bond", 8}}},
                                  {"sweep", {{"dt_values", {0.5, 1.0}}, {"reference_dt", 0.1},
                                             {"reference_max_bond", 8}}},
                                  {"jobs", 2},
                                  {"output_dir", dir.string()}});
    ASSERT_EQ(cmd_sweep(cfg), kOk);
    EXPECT_TRUE(fs::exists(dir / "reference.csv"));
    EXPECT_TRUE(fs::exists(dir / "run_dt_0p5.csv"));
    EXPECT_TRUE(fs::exists(dir / "run_dt_1.csv"));
    const std::string first = slurp(dir / "error_report.csv");
    ASSERT_EQ(cmd_analyze(cfg), kOk);
    EXPECT_EQ(slurp(dir / "error_report.csv"), first);
}

TEST(Commands, AnalyzeMissingInputsIsConfigError) {
    const auto dir = scratch("analyze_missing");
    RunConfig cfg = parse_config({{"schema_version", 1}, {"output_dir", dir.string()}});
    EXPECT_THROW(cmd_analyze(cfg), ConfigError);
}

TEST(Executable, ExitCodes) {
    const auto dir = scratch("exe");
    std::ofstream(dir / "good.json") << R"({"schema_version": 1, "chain": {"n_modes": 3}})";
    std::ofstream(dir / "bad.json") << R"({"schema_version": 1, "chain": {"n_mode": 3}})";
    EXPECT_EQ(run_cli("chain-coeffs --config " + (dir / "good.json").string() + " --out " + dir.string()), 0);
    EXPECT_TRUE(fs::exists(dir / "chain_coeffs.csv"));
    EXPECT_EQ(run_cli("chain-coeffs --config " + (dir / "bad.json").string() + " --out " + dir.string()), 1);
    EXPECT_NE(run_cli(""), 0);
    EXPECT_NE(run_cli("chain-coeffs --config /nonexistent.json"), 0);
}
