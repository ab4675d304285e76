#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "heattrack/grid.hpp"
#include "heattrack/jet.hpp"
#include "heattrack/target.hpp"

namespace heattrack {

struct SeriesOptions {
    double tol_series = 1e-12;
    int n_max = kDefaultMaxOrder;
};

/// A target whose derivatives all vanish at t = 0, either in closed form or
/// produced by mollification.
class FlatTarget {
public:
    /// Checks w^{(i)}(0) = 0 for i <= n_max within 1e-12.
    static FlatTarget closed_form(std::shared_ptr<const Target> target, double gevrey_order,
                                  int n_max = kDefaultMaxOrder);
    /// Skips the flatness check; for identity tests on non-flat closed forms.
    static FlatTarget unchecked_closed_form(std::shared_ptr<const Target> target, double gevrey_order,
                                            int n_max = kDefaultMaxOrder);
    static FlatTarget mollified(MollifiedTarget target);

    double gevrey_order() const noexcept { return gevrey_order_; }
    double t_end() const;
    int n_max() const noexcept { return n_max_; }
    const MollifiedTarget* mollifier() const noexcept { return mollified_ ? &*mollified_ : nullptr; }

    /// w^{(0..order)}(t).
    std::vector<double> derivatives(double t, int order) const;

private:
    FlatTarget() = default;

    std::shared_ptr<const Target> closed_;
    std::optional<MollifiedTarget> mollified_;
    double gevrey_order_ = 1.0;
    int n_max_ = kDefaultMaxOrder;
};

struct SeriesControl {
    Signal control;
    std::vector<int> terms_used;  // per time node
    double truncation_residual;   // max over nodes of the order-n_max term
    bool converged;               // false when some node hit n_max first
};

/// v(t) = sum_i L^{2i+1}/(2i+1)! w^{(i)}(t) over i <= n_max; a node counts as
/// converged when its last three terms are below tol_series * max(1, |v(t)|).
/// Time nodes are evaluated in parallel.
SeriesControl flat_control(const FlatTarget& target, double length, const TimeGrid& tgrid,
                           const SeriesOptions& options = {});

/// y(t,x) = sum_i x^{2i+1}/(2i+1)! w^{(i)}(t) on the space-time grid.
HeatField series_state(const FlatTarget& target, const SpaceGrid& xgrid, const TimeGrid& tgrid,
                       const SeriesOptions& options = {});

namespace reference {
// Serial versions of the kernels above; same per-node arithmetic.
SeriesControl flat_control(const FlatTarget& target, double length, const TimeGrid& tgrid,
                           const SeriesOptions& options = {});
HeatField series_state(const FlatTarget& target, const SpaceGrid& xgrid, const TimeGrid& tgrid,
                       const SeriesOptions& options = {});
}  // namespace reference

struct FlatTargetBuild {
    FlatTarget target;
    double delta;        // NaN when the target is zero
    bool delta_defined;
    bool delta_clamped;  // eps / |w| exceeded T
    double w1inf_norm;
};

/// Mollifies `base` with the bump of order r = 2 - s and width
/// delta = eps / |w|_{W^{1,inf}}, clamped to T.
FlatTargetBuild make_flat_target(std::shared_ptr<const Target> base, double s, double eps,
                                 const SeriesOptions& options = {});

struct CostReport {
    double eps;
    double delta;
    double v_sup_norm;
    double gs_argument;      // fitted_C / delta
    double bound_value;      // max(1,L) G_s(gs_argument) |w|; +inf on overflow
    double log_bound_value;  // log of bound_value, always finite
    double fitted_C;
    int terms_used_max;
    double truncation_residual;
    bool series_converged;
    bool delta_clamped;
    double w1inf_norm;
    double length;
    double t_end;
    double s;
};

/// Smallest C with |xi^{(i)}|_{L1} <= C^i (i!)^r for 1 <= i <= max_order
/// (r the bump order). Gives |w_delta^{(i)}| <= (C/delta)^i (i!)^r |w|.
double calibrate_bump_constant(const GevreyBump& bump, int max_order);

/// Per-term check, in log space, of
///   L^{2i+1} (C/delta)^i (i!)^{2-s} / (2i+1)!  <=  max(1,L) (max(1,L^2) C/delta)^i / (i!)^s
/// for i <= i_max. Returns the largest log-excess (<= 0 when all hold).
double cost_chain_max_log_excess(double s, double C, double delta, double length, int i_max);

struct TrackingResult {
    SeriesControl control;
    CostReport report;
    FlatTargetBuild build;
};

TrackingResult approximate_tracking(std::shared_ptr<const Target> base, double s, double eps, double length,
                                    const TimeGrid& tgrid, const SeriesOptions& options = {});

/// Flux d/dx y(., 0) of the Crank-Nicolson solve driven by `control` at x = L
/// with zero data elsewhere.
Signal closed_loop_flux(const Signal& control, const SpaceGrid& xgrid);

/// Samples w_delta (derivative order 0) of a flat target on a grid.
Signal sample_flat_target(const FlatTarget& target, const TimeGrid& tgrid);

}  // namespace heattrack
