#include "heattrack/hum.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "heattrack/error.hpp"

namespace heattrack {

namespace {

using Vec = std::vector<double>;

Vec to_vec(const Signal& s) { return Vec(s.values().begin(), s.values().end()); }

void axpy(double a, const Vec& x, Vec& y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace

HumOperator::HumOperator(const SpaceGrid& xgrid, const TimeGrid& tgrid)
    : xgrid_(xgrid), tgrid_(tgrid), stepper_(xgrid, tgrid), weights_(trapezoid_weights(tgrid)) {
    if (xgrid.n_cells() < 6) throw Error(ErrorKind::GridTooCoarse, "dual solver needs at least 6 cells");
    const double scale = -1.0 / (12.0 * xgrid.dx());
    const double c[4] = {48.0, -36.0, 16.0, -3.0};
    for (int i = 0; i < 4; ++i) stencil_[i] = scale * c[i];
}

Signal HumOperator::forward(const Signal& v) const {
    if (!(v.grid() == tgrid_)) throw Error(ErrorKind::IncompatibleGrid, "control must live on the operator time grid");
    const int N = tgrid_.n_steps();
    Vec u(stepper_.interior_size(), 0.0);
    Vec out(tgrid_.size(), 0.0);
    for (int n = 0; n < N; ++n) {
        stepper_.step(n, u, 0.0, 0.0, v[n], v[n + 1]);
        out[n + 1] = stencil_[0] * u[0] + stencil_[1] * u[1] + stencil_[2] * u[2] + stencil_[3] * u[3];
    }
    return Signal(tgrid_, std::move(out));
}

Signal HumOperator::apply_Bstar(const Signal& f) const {
    if (!(f.grid() == tgrid_)) throw Error(ErrorKind::IncompatibleGrid, "dual variable must live on the operator time grid");
    const int N = tgrid_.n_steps();
    const std::size_t m = stepper_.interior_size();
    const double r = stepper_.r();
    Vec ubar(m, 0.0);
    Vec mu(m);
    Vec vbar(tgrid_.size(), 0.0);
    auto seed = [&](int n) {
        const double a = weights_[n] * f[n];
        for (int i = 0; i < 4; ++i) ubar[i] += a * stencil_[i];
    };
    seed(N);
    for (int n = N - 1; n >= 0; --n) {
        mu = ubar;
        stepper_.solve(n, mu);
        const double th = stepper_.theta(n);
        vbar[n + 1] += r * th * mu[m - 1];
        vbar[n] += r * (1.0 - th) * mu[m - 1];
        stepper_.apply_explicit(n, mu, ubar);
        seed(n);
    }
    for (std::size_t n = 0; n < vbar.size(); ++n) vbar[n] /= weights_[n];
    return Signal(tgrid_, std::move(vbar));
}

Signal HumOperator::apply_Bstar_continuous(const Signal& f) const {
    const AdjointProblem p{xgrid_, tgrid_, f, Signal(tgrid_)};
    return flux_at_right(solve_heat_adjoint(p));
}

Signal HumOperator::apply_gramian(const Signal& f) const { return forward(apply_Bstar(f)); }

double HumOperator::inner(const Signal& a, const Signal& b) const {
    double sum = 0.0;
    for (std::size_t n = 0; n < weights_.size(); ++n) sum += weights_[n] * a[n] * b[n];
    return sum;
}

double HumOperator::norm(const Signal& a) const { return std::sqrt(inner(a, a)); }

JEvaluation eval_J(const HumOperator& op, const Signal& f, const Signal& w, const DualConfig& cfg) {
    if (!(f.grid() == op.tgrid()) || !(w.grid() == op.tgrid())) {
        throw Error(ErrorKind::IncompatibleGrid, "J needs f and w on the operator time grid");
    }
    const Signal Lf = op.apply_gramian(f);
    const double ff = op.inner(f, f);
    const double root = std::sqrt(ff + cfg.smoothing_sigma * cfg.smoothing_sigma);
    const double value = 0.5 * op.inner(Lf, f) - op.inner(f, w) + cfg.eps * root;
    Vec g(f.size());
    for (std::size_t n = 0; n < g.size(); ++n) g[n] = Lf[n] - w[n] + cfg.eps * f[n] / root;
    return {value, Signal(op.tgrid(), std::move(g))};
}

namespace {

void validate(const HumOperator& op, const Signal& w, const DualConfig& cfg) {
    if (!(w.grid() == op.tgrid())) throw Error(ErrorKind::IncompatibleGrid, "target must live on the operator time grid");
    for (double x : w.values()) {
        if (!std::isfinite(x)) throw Error(ErrorKind::InvalidInput, "target has non-finite samples");
    }
    if (!(cfg.eps >= 0.0)) throw Error(ErrorKind::InvalidInput, "eps must be nonnegative");
    if (!(cfg.grad_tol > 0.0)) throw Error(ErrorKind::InvalidInput, "grad_tol must be positive");
    if (cfg.max_iters < 1) throw Error(ErrorKind::InvalidInput, "max_iters must be positive");
    if (!(cfg.smoothing_sigma > 0.0) || cfg.smoothing_sigma > 1e-6 * std::max(op.norm(w), 1.0)) {
        throw Error(ErrorKind::InvalidInput, "smoothing_sigma must lie in (0, 1e-6 max(|w|, 1)]");
    }
}

double ritz_ratio(const std::vector<double>& alpha, const std::vector<double>& beta) {
    const std::size_t k = alpha.size();
    if (k == 0) return 1.0;
    Eigen::VectorXd diag(k);
    Eigen::VectorXd off(k > 1 ? k - 1 : 0);
    for (std::size_t i = 0; i < k; ++i) {
        diag[i] = 1.0 / alpha[i] + (i > 0 ? beta[i - 1] / alpha[i - 1] : 0.0);
        if (i + 1 < k) off[i] = std::sqrt(beta[i]) / alpha[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    const double lo = ev.minCoeff();
    return lo > 0.0 ? ev.maxCoeff() / lo : std::numeric_limits<double>::infinity();
}

HUMState conjugate_gradient(const HumOperator& op, const Signal& w, const DualConfig& cfg, int max_iters) {
    const TimeGrid& tg = op.tgrid();
    Vec f(tg.size(), 0.0);
    Vec r = to_vec(w);
    Vec p = r;
    double rr = op.inner(w, w);
    std::vector<double> alphas, betas, trace{0.0};
    int it = 0;
    bool converged = std::sqrt(rr) <= cfg.grad_tol;
    while (!converged && it < max_iters) {
        const Signal ps(tg, p);
        const Signal q = op.apply_gramian(ps);
        const double pq = op.inner(ps, q);
        if (!(pq > 0.0)) break;
        const double alpha = rr / pq;
        axpy(alpha, p, f);
        axpy(-alpha, to_vec(q), r);
        const Signal rs(tg, r);
        const double rr_new = op.inner(rs, rs);
        const double beta = rr_new / rr;
        alphas.push_back(alpha);
        betas.push_back(beta);
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
        rr = rr_new;
        ++it;
        // J(f) = 1/2 <Lf, f> - <f, w> with Lf = w - r
        Vec wr = to_vec(w);
        axpy(1.0, r, wr);
        trace.push_back(-0.5 * op.inner(Signal(tg, f), Signal(tg, wr)));
        converged = std::sqrt(rr) <= cfg.grad_tol;
    }
    if (!alphas.empty()) betas.pop_back();
    Signal fs(tg, std::move(f));
    Signal v = op.apply_Bstar(fs);
    const double J = trace.back();
    return HUMState{std::move(fs), std::move(v), J, std::sqrt(rr), it, converged, std::move(trace),
                    ritz_ratio(alphas, betas)};
}

// Minimizer over alpha of the smoothed J along f + alpha d, where the
// quadratic part is a + b alpha + c alpha^2 / 2 after dropping constants.
double line_search(double b, double c, double eps, double sigma2, double ff, double fd, double dd) {
    auto dphi = [&](double a) {
        const double root = std::sqrt(ff + 2.0 * a * fd + a * a * dd + sigma2);
        return b + c * a + eps * (fd + a * dd) / root;
    };
    double lo = 0.0;
    double hi = c > 0.0 ? std::max(-b / c, 1e-300) : 1.0;
    while (dphi(hi) < 0.0 && hi < 1e300) {
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (dphi(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

HUMState nonlinear_cg(const HumOperator& op, const Signal& w, const DualConfig& cfg) {
    const TimeGrid& tg = op.tgrid();
    const double sigma2 = cfg.smoothing_sigma * cfg.smoothing_sigma;
    Vec f(tg.size(), 0.0);
    Vec Lf(tg.size(), 0.0);
    auto gradient = [&](const Vec& fv, const Vec& Lfv) {
        const Signal fs(tg, fv);
        const double root = std::sqrt(op.inner(fs, fs) + sigma2);
        Vec g(fv.size());
        for (std::size_t n = 0; n < g.size(); ++n) g[n] = Lfv[n] - w[n] + cfg.eps * fv[n] / root;
        return g;
    };
    auto value = [&](const Vec& fv, const Vec& Lfv) {
        const Signal fs(tg, fv);
        return 0.5 * op.inner(Signal(tg, Lfv), fs) - op.inner(fs, w) + cfg.eps * std::sqrt(op.inner(fs, fs) + sigma2);
    };
    Vec g = gradient(f, Lf);
    Vec d(g.size());
    for (std::size_t n = 0; n < d.size(); ++n) d[n] = -g[n];
    double gg = op.inner(Signal(tg, g), Signal(tg, g));
    std::vector<double> trace{value(f, Lf)};
    int it = 0;
    bool converged = std::sqrt(gg) <= cfg.grad_tol;
    while (!converged && it < cfg.max_iters) {
        const Signal ds(tg, d);
        const Signal fs(tg, f);
        const Signal gs(tg, g);
        if (op.inner(gs, ds) >= 0.0) {  // lost descent; restart on steepest descent
            for (std::size_t n = 0; n < d.size(); ++n) d[n] = -g[n];
            continue;
        }
        const Vec Ld = to_vec(op.apply_gramian(ds));
        const Signal Lds(tg, Ld);
        const double b = op.inner(Signal(tg, Lf), ds) - op.inner(ds, w);
        const double c = op.inner(Lds, ds);
        const double alpha =
            line_search(b, c, cfg.eps, sigma2, op.inner(fs, fs), op.inner(fs, ds), op.inner(ds, ds));
        axpy(alpha, d, f);
        axpy(alpha, Ld, Lf);
        const Vec g_new = gradient(f, Lf);
        const Signal gns(tg, g_new);
        const double gg_new = op.inner(gns, gns);
        Vec diff = g_new;
        axpy(-1.0, g, diff);
        double beta = op.inner(gns, Signal(tg, diff)) / gg;
        ++it;
        if (beta < 0.0 || it % 50 == 0) beta = 0.0;
        for (std::size_t n = 0; n < d.size(); ++n) d[n] = -g_new[n] + beta * d[n];
        g = g_new;
        gg = gg_new;
        trace.push_back(std::min(trace.back(), value(f, Lf)));
        converged = std::sqrt(gg) <= cfg.grad_tol;
    }
    Signal fs(tg, std::move(f));
    Signal v = op.apply_Bstar(fs);
    const double J = trace.back();
    const double cond = conjugate_gradient(op, w, cfg, std::min(30, cfg.max_iters)).cg_condition_estimate;
    return HUMState{std::move(fs), std::move(v), J, std::sqrt(gg), it, converged, std::move(trace), cond};
}

}  // namespace

HUMState minimize_J(const HumOperator& op, const Signal& w, const DualConfig& cfg) {
    validate(op, w, cfg);
    if (cfg.eps == 0.0) return conjugate_gradient(op, w, cfg, cfg.max_iters);
    return nonlinear_cg(op, w, cfg);
}

HumResult synthesize_and_verify(const Signal& w, const DualConfig& cfg) {
    const HumOperator op(cfg.xgrid, cfg.tgrid);
    HUMState state = minimize_J(op, w, cfg);
    const HeatProblem closed_loop{cfg.xgrid, cfg.tgrid, Signal(cfg.tgrid), state.Bstar_p,
                                  std::vector<double>(cfg.xgrid.size(), 0.0)};
    const Signal flux = flux_at_left(solve_heat_forward(closed_loop));
    Vec ey(flux.size());
    Vec err(flux.size());
    for (std::size_t n = 0; n < ey.size(); ++n) {
        ey[n] = -flux[n];
        err[n] = ey[n] - w[n];
    }
    const double tracking = op.norm(Signal(cfg.tgrid, err));
    HumReport report{cfg.eps,
                     state.iterations,
                     state.converged,
                     tracking,
                     op.norm(state.f),
                     op.norm(state.Bstar_p),
                     state.grad_norm,
                     cfg.smoothing_sigma,
                     state.cg_condition_estimate,
                     tracking <= cfg.eps + cfg.tol_disc};
    return HumResult{std::move(state), report, Signal(cfg.tgrid, std::move(ey))};
}

ManufacturedTarget manufactured_target(const HumOperator& op) {
    const TimeGrid& tg = op.tgrid();
    Vec v(tg.size());
    for (int n = 0; n <= tg.n_steps(); ++n) {
        const double u = tg.node(n) / tg.t_end();
        const double s = std::sin(std::numbers::pi * u);
        v[n] = s * s * (1.0 + u);
    }
    Signal raw(tg, v);
    const Signal w_raw = op.forward(raw);
    const double scale = 1.0 / op.norm(w_raw);
    Vec w(w_raw.values().begin(), w_raw.values().end());
    for (auto& x : v) x *= scale;
    for (auto& x : w) x *= scale;
    return {Signal(tg, std::move(v)), Signal(tg, std::move(w))};
}

}  // namespace heattrack
