#pragma once

#include <vector>

#include "heattrack/grid.hpp"

namespace heattrack {

/// Heat kernel k(t,s) = exp(-s^2/(4t)) / sqrt(4 pi t); t > 0.
double kernel_eval(double t, double s);

/// Quadrature layout for y(t) = int k(t,s) z(s) ds over [-S(t), S(t)] with
/// S(t) = 2 sqrt(t ln(1/tol_k)), panels no wider than sqrt(t).
struct TransmutationPlan {
    TimeGrid tgrid;
    PseudoTimeGrid sgrid;  // wave grid, spans at least [-S(T), S(T)]
    double tol_k = 1e-14;
    int quad_nodes = 16;

    double truncation(double t) const;
};

/// Plan whose pseudo-time step equals dx (leapfrog at unit CFL) and whose
/// span covers S(T).
TransmutationPlan make_plan(const TimeGrid& tgrid, const SpaceGrid& xgrid, double tol_k = 1e-14,
                            int quad_nodes = 16);

/// Truncated kernel mass int_{-S(t)}^{S(t)} k(t,s) ds by the plan quadrature.
double kernel_mass(const TransmutationPlan& plan, double t);

/// int s^{2m} k(t,s) ds by the plan quadrature.
double kernel_moment(const TransmutationPlan& plan, double t, int m);

/// Weights of the quadrature for time node n folded onto the nodes of a
/// pseudo-time grid: transmuted(n) = sum_k weights[k] * z[first + k]. Node 0
/// gets the t -> 0+ limit (the value at s = 0); the kernel there is a Dirac mass.
struct TransmutationRow {
    std::size_t first = 0;
    std::vector<double> weights;
};
TransmutationRow transmutation_row(const TransmutationPlan& plan, const PseudoTimeGrid& sgrid, int n);

/// v(t) = int k(t,s) g(s) ds at every heat time node.
Signal transmute_signal(const WaveSignal& g, const TransmutationPlan& plan);

/// y(t,x) = int k(t,s) z(s,x) ds at every space node; parallel over time nodes.
HeatField transmute_field(const WaveField& z, const TransmutationPlan& plan);

namespace reference {
HeatField transmute_field(const WaveField& z, const TransmutationPlan& plan);
}

struct TransmutationReport {
    double heat_residual;      // max |centered y_t - y_xx| on interior nodes, t >= 2 dt
    double flux_identity;      // max |flux(transmuted) - transmuted(flux)|, t > 0
    double direct_solve_gap;   // max |direct heat solve - transmuted field|, t > 0
};

/// The wave initial state is the row at s = 0 and the control the column at x = L.
TransmutationReport verify_transmutation(const WaveField& z, const TransmutationPlan& plan);

/// Max |centered y_t - y_xx| over interior nodes with time index in [first_step, N-1].
double heat_residual(const HeatField& y, int first_step = 1);

}  // namespace heattrack
