#include "heattrack/transmutation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "heattrack/error.hpp"
#include "heattrack/pde.hpp"
#include "heattrack/quadrature.hpp"

namespace heattrack {

double kernel_eval(double t, double s) {
    if (!(t > 0.0)) throw Error(ErrorKind::OutOfDomain, "heat kernel needs t > 0");
    const double e = -s * s / (4.0 * t);
    return std::exp(e) / std::sqrt(4.0 * std::numbers::pi * t);
}

double TransmutationPlan::truncation(double t) const { return 2.0 * std::sqrt(t * std::log(1.0 / tol_k)); }

TransmutationPlan make_plan(const TimeGrid& tgrid, const SpaceGrid& xgrid, double tol_k, int quad_nodes) {
    if (!(tol_k > 0.0 && tol_k < 1.0)) throw Error(ErrorKind::InvalidInput, "tol_k must lie in (0, 1)");
    if (quad_nodes < 2) throw Error(ErrorKind::InvalidInput, "quad_nodes must be at least 2");
    const double S = 2.0 * std::sqrt(tgrid.t_end() * std::log(1.0 / tol_k));
    const int n_half = std::max(2, static_cast<int>(std::ceil(S / xgrid.dx() - 1e-9)));
    return TransmutationPlan{tgrid, PseudoTimeGrid(n_half * xgrid.dx(), n_half), tol_k, quad_nodes};
}

namespace {

struct KernelRule {
    std::vector<double> nodes;
    std::vector<double> weights;  // quadrature weight times kernel value
};

// Panels follow the cells of `sgrid` (split further to width <= sqrt(t)), so
// the piecewise-cubic interpolant of the wave data is a single polynomial on
// each panel and the Gauss rule sees no kinks.
KernelRule kernel_rule(const TransmutationPlan& plan, const PseudoTimeGrid& sgrid, double t) {
    const double S = std::min(plan.truncation(t), sgrid.s_max());
    const double ds = sgrid.ds();
    const double origin = -sgrid.s_max();
    static thread_local int cached_n = 0;
    static thread_local GaussRule base;
    if (cached_n != plan.quad_nodes) {
        base = gauss_legendre(plan.quad_nodes);
        cached_n = plan.quad_nodes;
    }
    const auto cells = static_cast<long>(sgrid.size()) - 1;
    const long lo = std::clamp(static_cast<long>(std::floor((-S - origin) / ds)), 0L, cells - 1);
    const long hi = std::clamp(static_cast<long>(std::ceil((S - origin) / ds)), lo + 1, cells);
    const double width = std::sqrt(t);
    KernelRule k;
    k.nodes.reserve(static_cast<std::size_t>((hi - lo) * plan.quad_nodes));
    k.weights.reserve(k.nodes.capacity());
    for (long c = lo; c < hi; ++c) {
        const double a = std::max(-S, origin + static_cast<double>(c) * ds);
        const double b = std::min(S, origin + static_cast<double>(c + 1) * ds);
        if (!(b > a)) continue;
        const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
        const double h = (b - a) / panels;
        for (int p = 0; p < panels; ++p) {
            const double mid = a + (p + 0.5) * h;
            for (std::size_t q = 0; q < base.nodes.size(); ++q) {
                const double s = mid + 0.5 * h * base.nodes[q];
                k.nodes.push_back(s);
                k.weights.push_back(0.5 * h * base.weights[q] * kernel_eval(t, s));
            }
        }
    }
    return k;
}

void require_support(const TransmutationPlan& plan, const PseudoTimeGrid& sgrid) {
    const double S = plan.truncation(plan.tgrid.t_end());
    if (sgrid.s_max() < S * (1.0 - 1e-12)) {
        throw Error(ErrorKind::InsufficientSupport, "wave data spans [-" + std::to_string(sgrid.s_max()) + ", " +
                                                        std::to_string(sgrid.s_max()) + "], kernel needs " +
                                                        std::to_string(S));
    }
}

}  // namespace

double kernel_mass(const TransmutationPlan& plan, double t) { return kernel_moment(plan, t, 0); }

double kernel_moment(const TransmutationPlan& plan, double t, int m) {
    const KernelRule k = kernel_rule(plan, plan.sgrid, t);
    // Neumaier summation: the truncated mass sits ~1e-15 below 1, inside plain rounding noise.
    double sum = 0.0, carry = 0.0;
    for (std::size_t q = 0; q < k.nodes.size(); ++q) {
        const double term = k.weights[q] * std::pow(k.nodes[q], 2 * m);
        const double next = sum + term;
        carry += std::abs(sum) >= std::abs(term) ? (sum - next) + term : (term - next) + sum;
        sum = next;
    }
    return sum + carry;
}

TransmutationRow transmutation_row(const TransmutationPlan& plan, const PseudoTimeGrid& sgrid, int n) {
    TransmutationRow row;
    if (n == 0) {
        row.first = static_cast<std::size_t>(sgrid.n_half());
        row.weights = {1.0};
        return row;
    }
    const KernelRule k = kernel_rule(plan, sgrid, plan.tgrid.node(n));
    const double origin = -sgrid.s_max();
    const std::size_t size = sgrid.size();
    const CubicStencil lo = cubic_stencil(size, origin, sgrid.ds(), k.nodes.front());
    const CubicStencil hi = cubic_stencil(size, origin, sgrid.ds(), k.nodes.back());
    row.first = lo.first;
    row.weights.assign(hi.first + 4 - lo.first, 0.0);
    for (std::size_t q = 0; q < k.nodes.size(); ++q) {
        const CubicStencil st = cubic_stencil(size, origin, sgrid.ds(), k.nodes[q]);
        for (int i = 0; i < 4; ++i) row.weights[st.first - row.first + i] += k.weights[q] * st.weights[i];
    }
    return row;
}

Signal transmute_signal(const WaveSignal& g, const TransmutationPlan& plan) {
    require_support(plan, g.grid());
    const auto v = g.values();
    std::vector<double> out(plan.tgrid.size());
    for (int n = 0; n <= plan.tgrid.n_steps(); ++n) {
        const TransmutationRow row = transmutation_row(plan, g.grid(), n);
        double sum = 0.0;
        for (std::size_t k = 0; k < row.weights.size(); ++k) sum += row.weights[k] * v[row.first + k];
        out[n] = sum;
    }
    return Signal(plan.tgrid, std::move(out));
}

HeatField transmute_field(const WaveField& z, const TransmutationPlan& plan) {
    require_support(plan, z.sgrid());
    HeatField y(plan.tgrid, z.xgrid());
    const int N = plan.tgrid.n_steps();
    const std::size_t nx = z.xgrid().size();
#pragma omp parallel for schedule(dynamic, 4)
    for (int n = 0; n <= N; ++n) {
        const TransmutationRow row = transmutation_row(plan, z.sgrid(), n);
        auto out = y.row(n);
        for (std::size_t k = 0; k < row.weights.size(); ++k) {
            const double w = row.weights[k];
            const auto src = z.row(row.first + k);
            for (std::size_t j = 0; j < nx; ++j) out[j] += w * src[j];
        }
    }
    return y;
}

namespace reference {

HeatField transmute_field(const WaveField& z, const TransmutationPlan& plan) {
    require_support(plan, z.sgrid());
    HeatField y(plan.tgrid, z.xgrid());
    const std::size_t nx = z.xgrid().size();
    const auto center = static_cast<std::size_t>(z.sgrid().n_half());
    for (std::size_t j = 0; j < nx; ++j) y(0, j) = z(center, j);
    for (int n = 1; n <= plan.tgrid.n_steps(); ++n) {
        const KernelRule k = kernel_rule(plan, z.sgrid(), plan.tgrid.node(n));
        for (std::size_t j = 0; j < nx; ++j) {
            const WaveSignal col = z.column(j);
            double sum = 0.0;
            for (std::size_t q = 0; q < k.nodes.size(); ++q) sum += k.weights[q] * col.sample(k.nodes[q]);
            y(n, j) = sum;
        }
    }
    return y;
}

}  // namespace reference

double heat_residual(const HeatField& y, int first_step) {
    const double dt = y.tgrid().dt();
    const double dx2 = y.xgrid().dx() * y.xgrid().dx();
    const int N = y.tgrid().n_steps();
    const std::size_t M = y.xgrid().size() - 1;
    double worst = 0.0;
    for (int n = std::max(first_step, 1); n < N; ++n) {
        for (std::size_t j = 1; j < M; ++j) {
            const double yt = (y(n + 1, j) - y(n - 1, j)) / (2.0 * dt);
            const double yxx = (y(n, j + 1) - 2.0 * y(n, j) + y(n, j - 1)) / dx2;
            worst = std::max(worst, std::abs(yt - yxx));
        }
    }
    return worst;
}

TransmutationReport verify_transmutation(const WaveField& z, const TransmutationPlan& plan) {
    const HeatField y = transmute_field(z, plan);
    TransmutationReport report{};
    report.heat_residual = heat_residual(y);

    const PseudoTimeGrid& sg = z.sgrid();
    const double scale = 1.0 / (12.0 * z.xgrid().dx());
    std::vector<double> wave_flux(sg.size());
    for (std::size_t k = 0; k < sg.size(); ++k) {
        const auto r = z.row(k);
        wave_flux[k] = (-25.0 * r[0] + 48.0 * r[1] - 36.0 * r[2] + 16.0 * r[3] - 3.0 * r[4]) * scale;
    }
    const Signal heat_flux = flux_at_left(y);
    const Signal transmuted_flux = transmute_signal(WaveSignal(sg, std::move(wave_flux)), plan);
    for (std::size_t n = 1; n < heat_flux.size(); ++n) {
        report.flux_identity = std::max(report.flux_identity, std::abs(heat_flux[n] - transmuted_flux[n]));
    }

    const std::size_t M = z.xgrid().size() - 1;
    const auto z0 = z.row(static_cast<std::size_t>(sg.n_half()));
    HeatProblem direct{z.xgrid(), plan.tgrid, transmute_signal(z.column(0), plan), transmute_signal(z.column(M), plan),
                       std::vector<double>(z0.begin(), z0.end())};
    const HeatField h = solve_heat_forward(direct);
    for (std::size_t n = 1; n < plan.tgrid.size(); ++n) {
        for (std::size_t j = 0; j <= M; ++j) {
            report.direct_solve_gap = std::max(report.direct_solve_gap, std::abs(h(n, j) - y(n, j)));
        }
    }
    return report;
}

}  // namespace heattrack
