// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "heattrack/error.hpp"
#include "heattrack/flatness.hpp"
#include "heattrack/hum.hpp"
#include "heattrack/pde.hpp"
#include "heattrack/special_functions.hpp"
#include "heattrack/targets.hpp"
#include "heattrack/transmutation.hpp"

using namespace heattrack;
using std::numbers::pi;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double sup_diff(const Signal& a, const Signal& b) {
    double d = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) d = std::max(d, std::abs(a[n] - b[n]));
    return d;
}

Signal sampled(const TimeGrid& g, const std::function<double(double)>& f) {
    std::vector<double> v(g.size());
    for (int n = 0; n <= g.n_steps(); ++n) v[n] = f(g.node(n));
    return Signal(g, std::move(v));
}

WaveSignal sampled(const PseudoTimeGrid& g, const std::function<double(double)>& f) {
    std::vector<double> v(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) v[k] = f(g.node(static_cast<int>(k)));
    return WaveSignal(g, std::move(v));
}

double order(double coarse, double fine) { return std::log2(coarse / fine); }

Outcome closed_loop_tracking() {
    auto ramp = std::make_shared<RampTarget>(1.0, 1.0);
    const TimeGrid tg(1.0, 4000);
    const SpaceGrid xg(1.0, 200);
    const double eps = 0.1;
    const TrackingResult r = approximate_tracking(ramp, 0.5, eps, 1.0, tg);
    const Signal flux = closed_loop_flux(r.control.control, xg);
    const double err_w = sup_diff(flux, sampled(tg, [](double t) { return t; }));
    const double err_wd = sup_diff(flux, sample_flat_target(r.build.target, tg));
    return {err_w <= eps + 5e-3 && err_wd <= 5e-3,
            fmt("|flux-w|=%.3e (<= %.3e), |flux-w_delta|=%.3e (<= 5e-3), series residual %.1e", err_w, eps + 5e-3,
                err_wd, r.control.truncation_residual)};
}

Outcome mollification_bound() {
    const GevreyBump bump = normalize_bump(1.5);
    const std::vector<std::pair<const char*, std::shared_ptr<const Target>>> targets{
        {"ramp", std::make_shared<RampTarget>(1.0, 1.0)},
        {"step(0.2,0.3)", std::make_shared<BumpIntegralTarget>(1.0, 0.2, 0.3, bump, 1.0)},
        {"step(0.5,0.1)", std::make_shared<BumpIntegralTarget>(2.0, 0.5, 0.1, bump, 1.0)}};
    bool pass = true;
    double worst_ratio = 0.0;
    for (const auto& [name, w] : targets) {
        const double norm = w->w1inf_norm();
        for (double delta : {0.05, 0.1, 0.2}) {
            const MollifiedTarget m(w, delta, bump);
            double err = 0.0;
            for (int n = 0; n <= 2000; ++n) {
                const double t = n / 2000.0;
                err = std::max(err, std::abs(mollified_derivatives(m, t, 0)[0] - w->value(t)));
            }
            pass = pass && err <= delta * norm + 1e-9;
            worst_ratio = std::max(worst_ratio, err / (delta * norm));
        }
    }
    return {pass, fmt("max |w_delta-w| / (delta |w|_W1inf) = %.3f over 3 targets x 3 widths", worst_ratio)};
}

Outcome cost_bound() {
    auto ramp = std::make_shared<RampTarget>(1.0, 1.0);
    const TimeGrid tg(1.0, 1000);
    bool pass = true;
    std::string detail;
    for (double eps : {0.2, 0.1, 0.05, 0.025}) {
        const CostReport r = approximate_tracking(ramp, 0.5, eps, 1.0, tg).report;
        const bool ok = std::log(r.v_sup_norm) <= r.log_bound_value;
        pass = pass && ok;
        detail += fmt("eps=%.3g: |v|=%.3e log(bound)=%.4g fitted_C=%.4g%s; ", eps, r.v_sup_norm, r.log_bound_value,
                      r.fitted_C, r.series_converged ? "" : " (series truncated at N_max)");
    }
    return {pass, detail};
}

Outcome gs_sandwich() {
    std::vector<double> xs(300);
    for (int k = 0; k < 300; ++k) xs[k] = 30.0 * k / 299.0;
    bool pass = true;
    std::string detail;
    for (double s : {0.3, 0.5, 0.8}) {
        const double C = fit_gs_upper_constant(s, std::vector<double>(xs.begin() + 1, xs.end()));
        for (double x : xs) {
            const double lg = gs_eval(s, x).log_value;
            const double p = std::pow(x, 1.0 / s);
            pass = pass && s * p <= lg && lg <= std::log(C) + C * p;
        }
        detail += fmt("s=%.1f C=%.4f; ", s, C);
    }
    double g1 = 0.0;
    for (double x : {1.0, 5.0, 10.0}) g1 = std::max(g1, std::abs(gs_eval(1.0, x).value / std::exp(x) - 1.0));
    pass = pass && g1 <= 1e-12;
    return {pass, detail + fmt("max |G_1/e^x - 1| = %.1e", g1)};
}

Outcome factorial() {
    const bool ok = factorial_inequality_check(200);
    return {ok, "big-integer identities for i <= 200"};
}

Outcome transmutation_identities() {
    // (a), (d) kernel mass and second moment
    const TimeGrid tg50(1.0, 50);
    const TransmutationPlan plan50 = make_plan(tg50, SpaceGrid(1.0, 50));
    double mass_lo = 2.0, mass_hi = 0.0, moment = 0.0;
    for (int n = 1; n <= 50; ++n) {
        const double t = tg50.node(n);
        const double m = kernel_mass(plan50, t);
        mass_lo = std::min(mass_lo, m);
        mass_hi = std::max(mass_hi, m);
        moment = std::max(moment, std::abs(kernel_moment(plan50, t, 1) / (2.0 * t) - 1.0));
    }
    const bool a = mass_lo >= 1.0 - 1e-12 && mass_hi <= 1.0;
    const bool d = moment <= 1e-8;

    // (b) steady state
    const SpaceGrid xs(1.0, 50);
    const TimeGrid ts(1.0, 200);
    const TransmutationPlan steady_plan = make_plan(ts, xs);
    std::vector<double> x(xs.size());
    for (int j = 0; j <= 50; ++j) x[j] = xs.node(j);
    const WaveField zs = solve_wave({xs, steady_plan.sgrid, sampled(steady_plan.sgrid, [](double) { return 1.0; }), x,
                                     std::vector<double>(xs.size(), 0.0)});
    const HeatField ys = transmute_field(zs, steady_plan);
    double steady = 0.0;
    for (std::size_t n = 0; n < ts.size(); ++n)
        for (int j = 0; j <= 50; ++j) steady = std::max(steady, std::abs(ys(n, j) - x[j]));
    const bool b = steady <= 1e-10;

    // (c) even control: bumps of width 2 centred at s = +-3
    const SpaceGrid xg(1.0, 50);
    const TimeGrid tg(1.0, 1000);
    const TransmutationPlan plan = make_plan(tg, xg);
    auto g = [](double s) {
        const double u = (std::abs(s) - 2.0) / 2.0;
        return u <= 0.0 || u >= 1.0 ? 0.0 : std::exp(4.0 - 1.0 / (u * (1.0 - u)));
    };
    const std::vector<double> rest(xg.size(), 0.0);
    const WaveField z = solve_wave({xg, plan.sgrid, sampled(plan.sgrid, g), rest, rest});
    const TransmutationReport rep = verify_transmutation(z, plan);
    const bool c = rep.heat_residual <= 1e-4 && rep.direct_solve_gap <= 5e-3;

    return {a && b && c && d, fmt("(a) mass in [%.16f, %.16f] %s; (b) steady gap %.1e %s; (c) residual %.2e, direct "
                                  "gap %.2e %s; (d) moment rel err %.1e %s",
                                  mass_lo, mass_hi, a ? "ok" : "FAIL", steady, b ? "ok" : "FAIL", rep.heat_residual,
                                  rep.direct_solve_gap, c ? "ok" : "FAIL", moment, d ? "ok" : "FAIL")};
}

Signal random_signal(const TimeGrid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(g.size());
    for (auto& x : v) x = u(rng);
    return Signal(g, std::move(v));
}

Outcome duality_and_gradient() {
    const HumOperator op(SpaceGrid(1.0, 50), TimeGrid(1.0, 500));
    const TimeGrid& tg = op.tgrid();
    std::mt19937_64 rng(2024);
    const double tol = 10.0 * std::max(tg.dt(), op.xgrid().dx() * op.xgrid().dx());
    double dual = 0.0, sym = 0.0;
    for (int k = 0; k < 10; ++k) {
        const Signal v = random_signal(tg, rng);
        const Signal f = random_signal(tg, rng);
        const double scale = op.norm(v) * op.norm(f);
        const double ev_f = op.inner(op.forward(v), f);
        dual = std::max(dual, std::abs(ev_f - op.inner(v, op.apply_Bstar(f))) / scale);
        const double a = op.inner(op.apply_gramian(v), f);
        const double b = op.inner(v, op.apply_gramian(f));
        sym = std::max(sym, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
    }
    const Signal w = manufactured_target(op).w;
    DualConfig cfg{op.xgrid(), tg, 0.05};
    const Signal f = random_signal(tg, rng);
    const JEvaluation j = eval_J(op, f, w, cfg);
    double grad = 0.0;
    for (int k = 0; k < 5; ++k) {
        const Signal dir = random_signal(tg, rng);
        const double h = 1e-5;
        auto shifted = [&](double a) {
            std::vector<double> v(tg.size());
            for (std::size_t n = 0; n < v.size(); ++n) v[n] = f[n] + a * dir[n];
            return eval_J(op, Signal(tg, std::move(v)), w, cfg).value;
        };
        const double fd = (shifted(h) - shifted(-h)) / (2.0 * h);
        const double an = op.inner(j.gradient, dir);
        grad = std::max(grad, std::abs(fd - an) / std::abs(an));
    }
    const bool pass = dual <= tol && sym <= 1e-8 && grad <= 1e-5;
    return {pass, fmt("duality gap %.1e (<= %.1e), symmetry %.1e, gradient vs FD %.1e", dual, tol, sym, grad)};
}

Outcome hum_closed_loop() {
    const HumOperator op(SpaceGrid(1.0, 50), TimeGrid(1.0, 500));
    const ManufacturedTarget m = manufactured_target(op);
    DualConfig cfg{op.xgrid(), op.tgrid(), 0.05};
    const HumResult r = synthesize_and_verify(m.w, cfg);
    const bool pass = r.report.tracking_error_l2 <= 0.05 + 5e-3 && r.report.iterations <= 500;
    return {pass, fmt("tracking error %.4e (<= 5.5e-2) after %d iterations, |v| = %.3e vs |v*| = %.3e",
                      r.report.tracking_error_l2, r.report.iterations, r.report.v_norm, op.norm(m.v_star))};
}

// sup error of CN against y = exp(-lambda t) sin(pi x). With lambda = pi^2 this is the PDE solution;
// with the discrete Laplacian eigenvalue it solves the semi-discrete system exactly, leaving time error only.
double heat_error(int cells, int steps, bool semi_discrete) {
    const SpaceGrid xg(1.0, cells);
    const TimeGrid tg(1.0, steps);
    const double h = xg.dx();
    const double lambda = semi_discrete ? std::pow(2.0 / h * std::sin(pi * h / 2.0), 2) : pi * pi;
    auto u = [&](double t, double x) { return std::exp(-lambda * t) * std::sin(pi * x); };
    std::vector<double> init(xg.size());
    for (int j = 0; j <= cells; ++j) init[j] = u(0.0, xg.node(j));
    const HeatField y = solve_heat_forward({xg, tg, Signal(tg), Signal(tg), init});
    double err = 0.0;
    for (int n = 0; n <= steps; ++n)
        for (int j = 0; j <= cells; ++j) err = std::max(err, std::abs(y(n, j) - u(tg.node(n), xg.node(j))));
    return err;
}

Outcome solver_convergence() {
    std::vector<double> ex, et;
    for (int n : {10, 20, 40}) ex.push_back(heat_error(n, n * n, false));
    for (int n : {200, 400, 800}) et.push_back(heat_error(50, n, true));
    const double ox = std::min(order(ex[0], ex[1]), order(ex[1], ex[2]));
    const double ot = std::min(order(et[0], et[1]), order(et[1], et[2]));

    const SpaceGrid xg(1.0, 64);
    const PseudoTimeGrid sg(200 * xg.dx(), 200);
    std::vector<double> z0(xg.size()), z1(xg.size(), 0.0);
    for (int j = 0; j <= 64; ++j) z0[j] = std::sin(pi * xg.node(j)) + 0.5 * std::sin(3.0 * pi * xg.node(j));
    const WaveField z = solve_wave({xg, sg, sampled(sg, [](double) { return 0.0; }), z0, z1});
    const double e0 = wave_energy(z, 0);
    double drift = 0.0;
    for (std::size_t k = 1; k + 1 < sg.size(); ++k) drift = std::max(drift, std::abs(wave_energy(z, k) - e0) / e0);

    return {ox >= 1.8 && ot >= 1.8 && drift <= 1e-10,
            fmt("dx order %.2f, dt order %.2f, wave energy drift %.1e", ox, ot, drift)};
}

Outcome series_self_consistency() {
    const FlatTargetBuild b = make_flat_target(std::make_shared<RampTarget>(1.0, 1.0), 0.5, 0.1);
    std::vector<double> res, flux;
    for (int cells : {20, 40, 80}) {
        const SpaceGrid xg(1.0, cells);
        res.push_back(heat_residual(series_state(b.target, xg, TimeGrid(1.0, cells * cells))));
        const TimeGrid tg(1.0, 200);
        flux.push_back(sup_diff(flux_at_left(series_state(b.target, xg, tg)), sample_flat_target(b.target, tg)));
    }
    const double o_res = std::min(order(res[0], res[1]), order(res[1], res[2]));
    const double o_flux = std::min(order(flux[0], flux[1]), order(flux[1], flux[2]));
    return {o_res >= 1.8 && o_flux >= 3.5,
            fmt("residual %.2e/%.2e/%.2e (order %.2f), flux error %.2e/%.2e/%.2e (order %.2f)", res[0], res[1], res[2],
                o_res, flux[0], flux[1], flux[2], o_flux)};
}

struct Criterion {
    int id;
    const char* name;
    double time_limit;  // seconds
    Outcome (*run)();
};

}  // namespace

int main() {
    const Criterion criteria[] = {
        {1, "closed-loop flatness tracking", 30, closed_loop_tracking},
        {2, "mollification bound", 5, mollification_bound},
        {3, "cost-bound consistency", 120, cost_bound},
        {4, "G_s sandwich", 5, gs_sandwich},
        {5, "factorial inequality", 1, factorial},
        {6, "transmutation identities", 120, transmutation_identities},
        {7, "duality and gradient", 60, duality_and_gradient},
        {8, "HUM closed loop", 120, hum_closed_loop},
        {9, "solver convergence", 60, solver_convergence},
        {10, "series state self-consistency", 30, series_self_consistency},
    };
    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool pass = o.pass && secs <= c.time_limit;
        failures += pass ? 0 : 1;
        std::printf("%s %2d %-30s %7.2fs (limit %gs)  %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs, c.time_limit,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
    return failures == 0 ? 0 : 1;
}
