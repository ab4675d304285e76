#pragma once

#include <cmath>
#include <vector>

namespace heattrack {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1], ascending
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
GaussRule gauss_legendre(int n);

/// Composite rule on [a, b] with `panels` equal panels of the base rule.
GaussRule composite_rule(const GaussRule& base, double a, double b, int panels);

/// Composite Gauss-Legendre with panel doubling until the relative change
/// drops below `rel_tol`; returns the finest estimate.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double rel_tol, int nodes_per_panel = 20, int max_panels = 4096) {
    const GaussRule base = gauss_legendre(nodes_per_panel);
    auto eval = [&](int panels) {
        const GaussRule r = composite_rule(base, a, b, panels);
        double sum = 0.0;
        for (std::size_t q = 0; q < r.nodes.size(); ++q) sum += r.weights[q] * f(r.nodes[q]);
        return sum;
    };
    int panels = 4;
    double prev = eval(panels);
    while (panels < max_panels) {
        panels *= 2;
        const double next = eval(panels);
        if (std::abs(next - prev) <= rel_tol * std::abs(next)) return next;
        prev = next;
    }
    return prev;
}

}  // namespace heattrack
