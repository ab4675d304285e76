#include "heattrack/flatness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "heattrack/error.hpp"
#include "heattrack/pde.hpp"
#include "heattrack/quadrature.hpp"
#include "heattrack/special_functions.hpp"
#include "heattrack/targets.hpp"

namespace heattrack {

FlatTarget FlatTarget::unchecked_closed_form(std::shared_ptr<const Target> target, double gevrey_order, int n_max) {
    if (!target || !target->has_derivatives()) {
        throw Error(ErrorKind::InvalidInput, "closed-form flat target needs derivative access");
    }
    FlatTarget f;
    f.closed_ = std::move(target);
    f.gevrey_order_ = gevrey_order;
    f.n_max_ = n_max;
    return f;
}

FlatTarget FlatTarget::closed_form(std::shared_ptr<const Target> target, double gevrey_order, int n_max) {
    FlatTarget f = unchecked_closed_form(std::move(target), gevrey_order, n_max);
    const auto d = f.closed_->derivatives(0.0, n_max);
    for (int i = 0; i <= n_max; ++i) {
        if (std::abs(d[i]) > 1e-12) {
            throw Error(ErrorKind::IncompatibleTarget,
                        "target is not flat at t = 0: derivative " + std::to_string(i) + " is " + std::to_string(d[i]));
        }
    }
    return f;
}

FlatTarget FlatTarget::mollified(MollifiedTarget target) {
    FlatTarget f;
    f.gevrey_order_ = target.bump().gevrey_order();
    f.n_max_ = target.bump().max_order();
    f.mollified_.emplace(std::move(target));
    return f;
}

double FlatTarget::t_end() const { return mollified_ ? mollified_->t_end() : closed_->t_end(); }

std::vector<double> FlatTarget::derivatives(double t, int order) const {
    if (order > n_max_) throw Error(ErrorKind::OrderCap, "derivative order exceeds N_max");
    return mollified_ ? mollified_derivatives(*mollified_, t, order) : closed_->derivatives(t, order);
}

namespace {

// log-space coefficients x^{2i+1} / (2i+1)!
std::vector<double> series_coefficients(double x, int n_max) {
    std::vector<double> c(n_max + 1, 0.0);
    if (x == 0.0) return c;
    const double lx = std::log(std::abs(x));
    for (int i = 0; i <= n_max; ++i) {
        const double mag = std::exp((2 * i + 1) * lx - std::lgamma(2.0 * i + 2.0));
        c[i] = x < 0.0 ? -mag : mag;
    }
    return c;
}

struct NodeSum {
    double value;
    int terms;
    double residual;
    bool converged;
};

// All available terms are summed: for small t the terms can start out tiny and
// grow for dozens of orders before decaying, so a run of small leading terms
// says nothing. The stopping rule is applied to the tail instead: the series
// counts as converged when the last three terms are below tol * max(1, |sum|),
// and `terms` is where the trailing run of small terms begins, plus three.
NodeSum sum_series(std::span<const double> derivs, std::span<const double> coeff, double tol) {
    const int n = static_cast<int>(derivs.size());
    double partial = 0.0;
    for (int i = 0; i < n; ++i) partial += coeff[i] * derivs[i];
    const double limit = tol * std::max(1.0, std::abs(partial));
    int last_large = -1;
    for (int i = n - 1; i >= 0; --i) {
        if (!(std::abs(coeff[i] * derivs[i]) < limit)) {
            last_large = i;
            break;
        }
    }
    const int terms = std::min(n, last_large + 4);
    return {partial, terms, std::abs(coeff[n - 1] * derivs[n - 1]), last_large + 3 < n};
}

void require_convergent(const FlatTarget& target) {
    if (target.gevrey_order() >= 2.0) {
        throw Error(ErrorKind::DivergentSeries, "flatness series needs Gevrey order below 2");
    }
}

void control_node(const FlatTarget& target, const std::vector<double>& coeff, const TimeGrid& tgrid,
                  const SeriesOptions& options, int n, std::vector<double>& values, std::vector<int>& terms,
                  std::vector<double>& residuals, std::vector<char>& converged) {
    const auto d = target.derivatives(tgrid.node(n), options.n_max);
    const NodeSum s = sum_series(d, coeff, options.tol_series);
    values[n] = s.value;
    terms[n] = s.terms;
    residuals[n] = s.residual;
    converged[n] = s.converged;
}

SeriesControl assemble(const TimeGrid& tgrid, std::vector<double> values, std::vector<int> terms,
                       const std::vector<double>& residuals, const std::vector<char>& converged) {
    SeriesControl out{Signal(tgrid, std::move(values)), std::move(terms), 0.0, true};
    for (std::size_t n = 0; n < residuals.size(); ++n) {
        out.truncation_residual = std::max(out.truncation_residual, residuals[n]);
        out.converged = out.converged && converged[n];
    }
    return out;
}

void state_node(const FlatTarget& target, const std::vector<std::vector<double>>& coeffs, const TimeGrid& tgrid,
                const SeriesOptions& options, int n, HeatField& field) {
    const auto d = target.derivatives(tgrid.node(n), options.n_max);
    auto row = field.row(n);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = sum_series(d, coeffs[j], options.tol_series).value;
}

std::vector<std::vector<double>> space_coefficients(const SpaceGrid& xgrid, int n_max) {
    std::vector<std::vector<double>> coeffs(xgrid.size());
    for (int j = 0; j <= xgrid.n_cells(); ++j) coeffs[j] = series_coefficients(xgrid.node(j), n_max);
    return coeffs;
}

}  // namespace

SeriesControl flat_control(const FlatTarget& target, double length, const TimeGrid& tgrid,
                           const SeriesOptions& options) {
    require_convergent(target);
    const auto coeff = series_coefficients(length, options.n_max);
    const int nodes = static_cast<int>(tgrid.size());
    std::vector<double> values(nodes);
    std::vector<int> terms(nodes);
    std::vector<double> residuals(nodes);
    std::vector<char> converged(nodes);
#pragma omp parallel for schedule(dynamic, 16)
    for (int n = 0; n < nodes; ++n) control_node(target, coeff, tgrid, options, n, values, terms, residuals, converged);
    return assemble(tgrid, std::move(values), std::move(terms), residuals, converged);
}

HeatField series_state(const FlatTarget& target, const SpaceGrid& xgrid, const TimeGrid& tgrid,
                       const SeriesOptions& options) {
    require_convergent(target);
    const auto coeffs = space_coefficients(xgrid, options.n_max);
    HeatField field(tgrid, xgrid);
    const int nodes = static_cast<int>(tgrid.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (int n = 0; n < nodes; ++n) state_node(target, coeffs, tgrid, options, n, field);
    return field;
}

namespace reference {

SeriesControl flat_control(const FlatTarget& target, double length, const TimeGrid& tgrid,
                           const SeriesOptions& options) {
    require_convergent(target);
    const auto coeff = series_coefficients(length, options.n_max);
    const int nodes = static_cast<int>(tgrid.size());
    std::vector<double> values(nodes);
    std::vector<int> terms(nodes);
    std::vector<double> residuals(nodes);
    std::vector<char> converged(nodes);
    for (int n = 0; n < nodes; ++n) control_node(target, coeff, tgrid, options, n, values, terms, residuals, converged);
    return assemble(tgrid, std::move(values), std::move(terms), residuals, converged);
}

HeatField series_state(const FlatTarget& target, const SpaceGrid& xgrid, const TimeGrid& tgrid,
                       const SeriesOptions& options) {
    require_convergent(target);
    const auto coeffs = space_coefficients(xgrid, options.n_max);
    HeatField field(tgrid, xgrid);
    for (int n = 0; n < static_cast<int>(tgrid.size()); ++n) state_node(target, coeffs, tgrid, options, n, field);
    return field;
}

}  // namespace reference

FlatTargetBuild make_flat_target(std::shared_ptr<const Target> base, double s, double eps,
                                 const SeriesOptions& options) {
    if (!base) throw Error(ErrorKind::InvalidInput, "missing base target");
    if (!(s > 0.0) || !(s < 1.0)) throw Error(ErrorKind::OutOfRange, "s must lie in (0, 1)");
    if (!(eps > 0.0)) throw Error(ErrorKind::OutOfRange, "eps must be positive");
    const double w0 = base->value(0.0);
    if (std::abs(w0) > 1e-10) {
        throw Error(ErrorKind::IncompatibleTarget, "target must vanish at t = 0 (w(0) = " + std::to_string(w0) + ")");
    }
    const double norm = base->w1inf_norm();
    if (norm == 0.0) {
        auto zero = std::make_shared<ZeroTarget>(base->t_end());
        return {FlatTarget::closed_form(zero, 1.0, options.n_max), std::numeric_limits<double>::quiet_NaN(), false,
                false, 0.0};
    }
    double delta = eps / norm;
    bool clamped = false;
    if (delta > base->t_end()) {
        delta = base->t_end();
        clamped = true;
    }
    GevreyBump bump = normalize_bump(2.0 - s, options.n_max);
    return {FlatTarget::mollified(MollifiedTarget(std::move(base), delta, bump)), delta, true, clamped, norm};
}

double calibrate_bump_constant(const GevreyBump& bump, int max_order) {
    const GaussRule rule = composite_rule(gauss_legendre(16), 0.0, 1.0, 512);
    std::vector<double> l1(max_order + 1, 0.0);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const auto d = bump_jet(bump, rule.nodes[q], max_order).derivatives();
        for (int i = 0; i <= max_order; ++i) l1[i] += rule.weights[q] * std::abs(d[i]);
    }
    const double r = bump.gevrey_order();
    double c = 0.0;
    for (int i = 1; i <= max_order; ++i) {
        if (l1[i] == 0.0) continue;
        c = std::max(c, std::exp((std::log(l1[i]) - r * std::lgamma(i + 1.0)) / i));
    }
    return c;
}

double cost_chain_max_log_excess(double s, double C, double delta, double length, int i_max) {
    const double lL = std::log(length);
    const double l1 = std::log(std::max(1.0, length));
    const double l2 = std::log(std::max(1.0, length * length));
    const double lc = std::log(C / delta);
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= i_max; ++i) {
        const double lf = std::lgamma(i + 1.0);
        const double lhs = (2 * i + 1) * lL + i * lc + (2.0 - s) * lf - std::lgamma(2.0 * i + 2.0);
        const double rhs = l1 + i * (l2 + lc) - s * lf;
        worst = std::max(worst, lhs - rhs);
    }
    return worst;
}

TrackingResult approximate_tracking(std::shared_ptr<const Target> base, double s, double eps, double length,
                                    const TimeGrid& tgrid, const SeriesOptions& options) {
    const double t_end = base ? base->t_end() : 0.0;
    FlatTargetBuild build = make_flat_target(std::move(base), s, eps, options);
    SeriesControl control = flat_control(build.target, length, tgrid, options);
    CostReport report{};
    report.eps = eps;
    report.delta = build.delta;
    report.v_sup_norm = signal_norm(control.control, NormKind::Sup);
    report.terms_used_max = *std::max_element(control.terms_used.begin(), control.terms_used.end());
    report.truncation_residual = control.truncation_residual;
    report.series_converged = control.converged;
    report.delta_clamped = build.delta_clamped;
    report.w1inf_norm = build.w1inf_norm;
    report.length = length;
    report.t_end = t_end;
    report.s = s;
    if (!build.delta_defined) {
        report.gs_argument = 0.0;
        report.bound_value = 0.0;
        report.log_bound_value = -std::numeric_limits<double>::infinity();
        report.fitted_C = 0.0;
    } else {
        const double c_xi = calibrate_bump_constant(build.target.mollifier()->bump(), options.n_max);
        report.fitted_C = c_xi * std::max(1.0, length * length);
        report.gs_argument = report.fitted_C / build.delta;
        const GsEvaluation g = gs_eval(s, report.gs_argument);
        report.log_bound_value = std::log(std::max(1.0, length)) + g.log_value + std::log(build.w1inf_norm);
        report.bound_value = std::exp(report.log_bound_value);
    }
    return {std::move(control), report, std::move(build)};
}

Signal closed_loop_flux(const Signal& control, const SpaceGrid& xgrid) {
    const TimeGrid& tgrid = control.grid();
    const HeatProblem p{xgrid, tgrid, Signal(tgrid), control, std::vector<double>(xgrid.size(), 0.0)};
    return flux_at_left(solve_heat_forward(p));
}

Signal sample_flat_target(const FlatTarget& target, const TimeGrid& tgrid) {
    std::vector<double> v(tgrid.size());
    const int nodes = static_cast<int>(tgrid.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (int n = 0; n < nodes; ++n) v[n] = target.derivatives(tgrid.node(n), 0)[0];
    return Signal(tgrid, std::move(v));
}

}  // namespace heattrack
