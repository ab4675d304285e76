#pragma once

#include <vector>

#include "heattrack/grid.hpp"
#include "heattrack/pde.hpp"

namespace heattrack {

struct DualConfig {
    SpaceGrid xgrid;
    TimeGrid tgrid;
    double eps = 0.0;
    double smoothing_sigma = 1e-8;  // at most 1e-6 * max(|w|_L2, 1)
    int max_iters = 500;
    double grad_tol = 1e-6;
    double tol_disc = 5e-3;  // slack for the closed-loop check
};

/// Observation and control maps of the tracking problem on fixed grids.
///   forward(v)     = E y_v = -d/dx y_v(., 0), y driven by y(t, L) = v, zero elsewhere
///   apply_Bstar(f) = the transpose of `forward` in the trapezoid inner product,
///                    so <v, B* f> = <forward(v), f> holds to rounding
///   apply_gramian  = forward o apply_Bstar
/// apply_Bstar_continuous solves the adjoint problem p(t,0) = f, p(t,L) = 0,
/// p(T) = 0 and returns +d/dx p(., L); it agrees with apply_Bstar up to
/// discretization error.
class HumOperator {
public:
    HumOperator(const SpaceGrid& xgrid, const TimeGrid& tgrid);

    const SpaceGrid& xgrid() const noexcept { return xgrid_; }
    const TimeGrid& tgrid() const noexcept { return tgrid_; }
    std::span<const double> weights() const noexcept { return weights_; }

    Signal forward(const Signal& v) const;
    Signal apply_Bstar(const Signal& f) const;
    Signal apply_Bstar_continuous(const Signal& f) const;
    Signal apply_gramian(const Signal& f) const;

    /// Trapezoid inner product and norm.
    double inner(const Signal& a, const Signal& b) const;
    double norm(const Signal& a) const;

private:
    SpaceGrid xgrid_;
    TimeGrid tgrid_;
    HeatStepper stepper_;
    std::vector<double> weights_;
    double stencil_[4];  // E y in terms of interior nodes 1..4
};

struct JEvaluation {
    double value;
    Signal gradient;
};

/// J(f) = 1/2 <Lf, f> - <f, w> + eps sqrt(<f, f> + sigma^2) and its gradient
/// in the trapezoid inner product.
JEvaluation eval_J(const HumOperator& op, const Signal& f, const Signal& w, const DualConfig& cfg);

struct HUMState {
    Signal f;
    Signal Bstar_p;  // the control v = B* f
    double J_value;
    double grad_norm;
    int iterations;
    bool converged;
    std::vector<double> J_trace;
    double cg_condition_estimate;  // ratio of extreme Ritz values of the Gramian
};

/// eps = 0: conjugate gradients on L f = w, stopped at grad_tol or max_iters.
/// eps > 0: Polak-Ribiere nonlinear CG on the smoothed J with exact line search.
HUMState minimize_J(const HumOperator& op, const Signal& w, const DualConfig& cfg);

struct HumReport {
    double eps;
    int iterations;
    bool converged;
    double tracking_error_l2;
    double f_norm;
    double v_norm;
    double grad_norm;
    double smoothing_sigma;
    double cg_condition_estimate;
    bool within_tolerance;  // tracking_error_l2 <= eps + tol_disc
};

struct HumResult {
    HUMState state;
    HumReport report;
    Signal tracked_flux;  // E y from an independent forward solve with v = B* f
};

HumResult synthesize_and_verify(const Signal& w, const DualConfig& cfg);

struct ManufacturedTarget {
    Signal v_star;
    Signal w;  // forward(v_star), scaled so |w|_L2 = 1
};

/// Generating control v*(t) = sin^2(pi t / T) (1 + t / T), rescaled together with w.
ManufacturedTarget manufactured_target(const HumOperator& op);

}  // namespace heattrack
