#include "colchain/specdens.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "colchain/errors.hpp"
#include "colchain/quadrature.hpp"

namespace colchain {

namespace {

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
constexpr double kFourierTol = 1e-10;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

bool parse_double(const std::string& text, double& out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    std::size_t used = 0;
    try {
        out = std::stod(t, &used);
    } catch (const std::exception&) {
        return false;
    }
    return used == t.size() && std::isfinite(out);
}

// (exp(-i w a) - exp(-i w b)) / (i w), continuous at w = 0
std::complex<double> bin_transform(double w, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    const double x = w * half;
    const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
    return std::polar(2.0 * half * sinc, -w * mid);
}

}  // namespace

std::string to_string(SpectralKind kind) {
    switch (kind) {
        case SpectralKind::Flat: return "flat";
        case SpectralKind::Ohmic: return "ohmic";
        case SpectralKind::Tabulated: return "tabulated";
    }
    return "unknown";
}

SpectralKind spectral_kind_from_string(const std::string& name) {
    if (name == "flat") return SpectralKind::Flat;
    if (name == "ohmic") return SpectralKind::Ohmic;
    if (name == "tabulated") return SpectralKind::Tabulated;
    throw ConfigError("unknown spectral density kind '" + name + "'");
}

SpectralDensity SpectralDensity::flat(double omega_c, double g) {
    if (!(omega_c > 0.0) || !std::isfinite(omega_c)) throw ConfigError("cutoff must be positive");
    SpectralDensity sd;
    sd.kind_ = SpectralKind::Flat;
    sd.omega_c_ = omega_c;
    sd.g_ = g;
    return sd;
}

SpectralDensity SpectralDensity::ohmic(double alpha, double omega_c, double g) {
    if (!(omega_c > 0.0) || !std::isfinite(omega_c)) throw ConfigError("cutoff must be positive");
    if (!(alpha >= 0.0)) throw ConfigError("Ohmic strength alpha must be nonnegative");
    SpectralDensity sd;
    sd.kind_ = SpectralKind::Ohmic;
    sd.omega_c_ = omega_c;
    sd.alpha_ = alpha;
    sd.g_ = g;
    return sd;
}

SpectralDensity SpectralDensity::tabulated(std::vector<SpectralSample> samples, double g) {
    if (samples.empty()) throw ConfigError("tabulated spectral density has an empty table");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i].omega) || !std::isfinite(samples[i].value)) {
            throw ConfigError("tabulated spectral density has a non-finite sample");
        }
        if (samples[i].value < 0.0) throw ConfigError("tabulated spectral density must be nonnegative");
        if (samples[i].omega < 0.0) throw ConfigError("tabulated frequencies must be nonnegative");
        if (i > 0 && !(samples[i].omega > samples[i - 1].omega)) {
            throw ConfigError("tabulated frequencies must be strictly increasing");
        }
    }
    if (!(samples.back().omega > 0.0)) throw ConfigError("tabulated cutoff must be positive");
    SpectralDensity sd;
    sd.kind_ = SpectralKind::Tabulated;
    sd.omega_c_ = samples.back().omega;
    sd.g_ = g;
    sd.table_ = std::move(samples);
    return sd;
}

SpectralDensity SpectralDensity::with_g(double g) const {
    SpectralDensity copy = *this;
    copy.g_ = g;
    return copy;
}

std::vector<double> SpectralDensity::breakpoints() const {
    if (kind_ != SpectralKind::Tabulated) return {0.0, omega_c_};
    std::vector<double> out;
    out.reserve(table_.size() + 1);
    if (table_.front().omega > 0.0) out.push_back(0.0);
    for (const auto& s : table_) out.push_back(s.omega);
    return out;
}

double evaluate(const SpectralDensity& sd, double omega) {
    if (!std::isfinite(omega)) throw ConfigError("spectral density evaluated at a non-finite frequency");
    if (omega < 0.0 || omega > sd.omega_c()) return 0.0;
    switch (sd.kind()) {
        case SpectralKind::Flat: return 1.0;
        case SpectralKind::Ohmic: return 2.0 * sd.alpha() * omega;
        case SpectralKind::Tabulated: {
            const auto& t = sd.table();
            if (t.empty()) throw ConfigError("tabulated spectral density has an empty table");
            if (omega < t.front().omega) return 0.0;
            auto hi = std::lower_bound(t.begin(), t.end(), omega,
                                       [](const SpectralSample& s, double w) { return s.omega < w; });
            if (hi == t.begin()) return hi->value;
            auto lo = hi - 1;
            const double f = (omega - lo->omega) / (hi->omega - lo->omega);
            return lo->value + f * (hi->value - lo->value);
        }
    }
    return 0.0;
}

double total_weight(const SpectralDensity& sd) {
    switch (sd.kind()) {
        case SpectralKind::Flat: return sd.omega_c();
        case SpectralKind::Ohmic: return sd.alpha() * sd.omega_c() * sd.omega_c();
        case SpectralKind::Tabulated: {
            const auto& t = sd.table();
            double sum = 0.0;
            for (std::size_t i = 1; i < t.size(); ++i) {
                sum += 0.5 * (t[i].value + t[i - 1].value) * (t[i].omega - t[i - 1].omega);
            }
            return sum;
        }
    }
    return 0.0;
}

std::complex<double> fourier_sqrt_J(const SpectralDensity& sd, double tau) {
    const double wc = sd.omega_c();
    if (sd.kind() == SpectralKind::Flat) {
        const double x = 0.5 * wc * tau;
        const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
        return std::polar(kInvSqrt2Pi * wc * sinc, -x);
    }
    const auto breaks = sd.breakpoints();
    quad::Options opts;
    opts.abs_tol = kFourierTol;
    opts.frequency = tau;
    auto integrand = [&](double w) {
        return std::sqrt(evaluate(sd, w)) * std::polar(1.0, -w * tau);
    };
    return kInvSqrt2Pi * quad::integrate<std::complex<double>>(integrand, breaks, opts).value;
}

std::complex<double> fourier_sqrt_J_integral(const SpectralDensity& sd, double a, double b) {
    const auto breaks = sd.breakpoints();
    quad::Options opts;
    opts.abs_tol = kFourierTol;
    opts.frequency = std::max(std::abs(a), std::abs(b));
    auto integrand = [&](double w) { return std::sqrt(evaluate(sd, w)) * bin_transform(w, a, b); };
    return kInvSqrt2Pi * quad::integrate<std::complex<double>>(integrand, breaks, opts).value;
}

FourierKernel fourier_kernel(const SpectralDensity& sd, std::span<const double> taus) {
    FourierKernel k;
    k.tau_grid.assign(taus.begin(), taus.end());
    k.values.reserve(taus.size());
    for (double tau : taus) k.values.push_back(fourier_sqrt_J(sd, tau));
    return k;
}

SpectralDensity load_tabulated(const std::filesystem::path& path, double g) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open spectral density file " + path.string());
    std::vector<SpectralSample> samples;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        // Strip a UTF-8 byte-order mark on the first line
        if (row == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        const auto comma = line.find(',');
        double w = 0.0;
        double j = 0.0;
        const bool ok = comma != std::string::npos && line.find(',', comma + 1) == std::string::npos &&
                        parse_double(line.substr(0, comma), w) && parse_double(line.substr(comma + 1), j);
        if (!ok) {
            if (row == 1 && samples.empty()) continue;  // header
            throw ParseError("malformed spectral density row", row);
        }
        if (j < 0.0) throw ParseError("negative spectral density value", row);
        if (w < 0.0) throw ParseError("negative frequency", row);
        if (!samples.empty() && !(w > samples.back().omega)) {
            throw ParseError("frequencies must be strictly increasing", row);
        }
        samples.push_back({w, j});
    }
    if (samples.empty()) throw ConfigError("spectral density file " + path.string() + " has no samples");
    return SpectralDensity::tabulated(std::move(samples), g);
}

}  // namespace colchain
