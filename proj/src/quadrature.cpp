#include "heattrack/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "heattrack/error.hpp"

namespace heattrack {

GaussRule gauss_legendre(int n) {
    if (n < 1) throw Error(ErrorKind::InvalidInput, "Gauss-Legendre rule needs at least one node");
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged root
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

GaussRule composite_rule(const GaussRule& base, double a, double b, int panels) {
    GaussRule out;
    const std::size_t m = base.nodes.size();
    out.nodes.reserve(m * panels);
    out.weights.reserve(m * panels);
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + h * p;
        for (std::size_t q = 0; q < m; ++q) {
            out.nodes.push_back(lo + 0.5 * h * (base.nodes[q] + 1.0));
            out.weights.push_back(0.5 * h * base.weights[q]);
        }
    }
    return out;
}

}  // namespace heattrack
