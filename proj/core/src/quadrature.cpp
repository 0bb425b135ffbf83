#include "colchain/quadrature.hpp"

#include <cmath>

namespace colchain::quad {

Rule gauss_legendre(std::size_t n) {
    if (n == 0) throw ConfigError("Gauss-Legendre rule needs at least one node");
    Rule rule;
    if (n == 1) {
        rule.nodes = {0.0};
        rule.weights = {2.0};
        return rule;
    }
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const std::size_t half = (n + 1) / 2;
    const double nd = static_cast<double>(n);
    for (std::size_t i = 0; i < half; ++i) {
        // Tricomi initial guess, refined by Newton on P_n
        double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) / (nd + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double kd = static_cast<double>(k);
                const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
                p0 = p1;
                p1 = p2;
            }
            dp = nd * (x * p1 - p0) / (x * x - 1.0);
            const double step = p1 / dp;
            x -= step;
            if (std::abs(step) < 1e-16) break;
        }
        // Recompute the derivative at the converged node
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double kd = static_cast<double>(k);
            const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
            p0 = p1;
            p1 = p2;
        }
        dp = nd * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

Rule gauss_legendre(std::size_t n, double a, double b) {
    Rule rule = gauss_legendre(n);
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    for (std::size_t i = 0; i < n; ++i) {
        rule.nodes[i] = c + h * rule.nodes[i];
        rule.weights[i] *= h;
    }
    return rule;
}

Rule composite_gauss_legendre(std::span<const double> breakpoints, std::size_t per_panel) {
    Rule out;
    if (breakpoints.size() < 2) return out;
    const Rule ref = gauss_legendre(per_panel);
    out.nodes.reserve(per_panel * (breakpoints.size() - 1));
    out.weights.reserve(per_panel * (breakpoints.size() - 1));
    for (std::size_t p = 0; p + 1 < breakpoints.size(); ++p) {
        const double c = 0.5 * (breakpoints[p] + breakpoints[p + 1]);
        const double h = 0.5 * (breakpoints[p + 1] - breakpoints[p]);
        for (std::size_t i = 0; i < per_panel; ++i) {
            out.nodes.push_back(c + h * ref.nodes[i]);
            out.weights.push_back(h * ref.weights[i]);
        }
    }
    return out;
}

}  // namespace colchain::quad
