#pragma once

#include <span>
#include <vector>

#include "heattrack/grid.hpp"

namespace heattrack {

/// y_t = y_xx on (0,T)x(0,L) with Dirichlet data at both ends.
struct HeatProblem {
    SpaceGrid xgrid;
    TimeGrid tgrid;
    Signal left_bc;
    Signal right_bc;
    std::vector<double> initial;  // over space nodes
};

/// -p_t - p_xx = 0 with p(T) = 0 and Dirichlet data at both ends.
struct AdjointProblem {
    SpaceGrid xgrid;
    TimeGrid tgrid;
    Signal left_bc;
    Signal right_bc;
};

/// z_ss = z_xx over s in [-S, S], z(s,0) = 0, z(s,L) = g(s), z(0) = z0, z_s(0) = z1.
struct WaveProblem {
    SpaceGrid xgrid;
    PseudoTimeGrid sgrid;
    WaveSignal control;
    std::vector<double> initial_displacement;
    std::vector<double> initial_velocity;
};

/// Crank-Nicolson time stepping for the interior nodes 1..M-1, with the
/// first `kImplicitStartSteps` steps taken by implicit Euler (Rannacher
/// startup). Step n maps u^n to u^{n+1}:
///   (I + theta r K) u^{n+1} = (I - (1-theta) r K) u^n + boundary terms,
/// K = tridiag(-1, 2, -1), r = dt / dx^2.
class HeatStepper {
public:
    static constexpr int kImplicitStartSteps = 2;

    HeatStepper(const SpaceGrid& xgrid, const TimeGrid& tgrid);

    double r() const noexcept { return r_; }
    std::size_t interior_size() const noexcept { return m_; }
    double theta(int step) const noexcept { return step < kImplicitStartSteps ? 1.0 : 0.5; }

    /// u <- u^{n+1} given boundary values at n and n+1.
    void step(int n, std::span<double> u, double left_n, double left_np1, double right_n, double right_np1) const;

    /// rhs <- (I + theta_n r K)^{-1} rhs.
    void solve(int n, std::span<double> rhs) const;

    /// out = (I - (1 - theta_n) r K) in, zero Dirichlet closure.
    void apply_explicit(int n, std::span<const double> in, std::span<double> out) const;

private:
    struct Factor {
        std::vector<double> c;      // modified super-diagonal
        std::vector<double> denom;  // pivots
        double off;
    };
    static Factor factor(std::size_t m, double diag, double off);
    static void solve_factored(const Factor& f, std::span<double> rhs);

    std::size_t m_;
    double r_;
    Factor implicit_;
    Factor crank_nicolson_;
};

HeatField solve_heat_forward(const HeatProblem& p);

/// Substitutes tau = T - t and reuses the forward solver; the result is
/// indexed in the original time.
HeatField solve_heat_adjoint(const AdjointProblem& p);

/// d/dx y(t, L) from the mirrored five-point stencil.
Signal flux_at_right(const HeatField& field);

/// Leapfrog from s = 0 forward to +S and, flipping the velocity, backward to
/// -S. The first step is the Taylor start z^1 = z^0 + ds z1 + ds^2/2 D_h z^0.
WaveField solve_wave(const WaveProblem& p);

/// Conserved leapfrog energy between pseudo-time nodes k and k+1:
/// 1/2 |(z^{k+1} - z^k)/ds|^2 + 1/2 <D z^{k+1}, D z^k>, with dx-weighted sums.
double wave_energy(const WaveField& z, std::size_t k);

}  // namespace heattrack
