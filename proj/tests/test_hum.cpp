#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "heattrack/error.hpp"
#include "heattrack/hum.hpp"
#include "heattrack/pde.hpp"

using namespace heattrack;

namespace {

Signal random_signal(const TimeGrid& g, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    std::vector<double> v(g.size());
    for (auto& x : v) x = nd(rng);
    return Signal(g, std::move(v));
}

Signal axpy(double a, const Signal& x, const Signal& y) {
    std::vector<double> v(x.size());
    for (std::size_t n = 0; n < v.size(); ++n) v[n] = a * x[n] + y[n];
    return Signal(x.grid(), std::move(v));
}

// smooth dual variable vanishing at both ends
Signal smooth_signal(const TimeGrid& g) {
    std::vector<double> v(g.size());
    for (int n = 0; n <= g.n_steps(); ++n) {
        const double t = g.node(n) / g.t_end();
        v[n] = std::sin(3.0 * t) * t * (1.0 - t);
    }
    return Signal(g, std::move(v));
}

}  // namespace

TEST_CASE("operators vanish on zero data") {
    const HumOperator op(SpaceGrid(1.0, 10), TimeGrid(1.0, 50));
    const Signal zero(op.tgrid());
    for (const Signal& s : {op.forward(zero), op.apply_Bstar(zero), op.apply_gramian(zero)})
        for (double v : s.values()) CHECK(v == 0.0);
    DualConfig cfg{op.xgrid(), op.tgrid(), 0.1};
    const JEvaluation j = eval_J(op, zero, zero, cfg);
    CHECK(j.value == doctest::Approx(0.1 * cfg.smoothing_sigma));
}

TEST_CASE("B* is the transpose of the observation map") {
    const HumOperator op(SpaceGrid(1.0, 16), TimeGrid(0.7, 90));
    std::mt19937_64 rng(7);
    for (int k = 0; k < 10; ++k) {
        const Signal v = random_signal(op.tgrid(), rng);
        const Signal f = random_signal(op.tgrid(), rng);
        const double lhs = op.inner(op.forward(v), f);
        const double rhs = op.inner(v, op.apply_Bstar(f));
        CHECK(std::abs(lhs - rhs) <= 1e-12 * op.norm(op.forward(v)) * op.norm(f) + 1e-12 * std::abs(lhs));
    }
}

TEST_CASE("Gramian is symmetric and positive") {
    const HumOperator op(SpaceGrid(1.0, 12), TimeGrid(1.0, 60));
    std::mt19937_64 rng(11);
    for (int k = 0; k < 10; ++k) {
        const Signal f = random_signal(op.tgrid(), rng);
        const Signal g = random_signal(op.tgrid(), rng);
        const double a = op.inner(op.apply_gramian(f), g);
        const double b = op.inner(f, op.apply_gramian(g));
        CHECK(std::abs(a - b) <= 1e-10 * std::max(std::abs(a), 1e-300));
        // <L f, f> = |B* f|^2
        const double q = op.inner(op.apply_gramian(f), f);
        CHECK(q >= 0.0);
        CHECK(q == doctest::Approx(std::pow(op.norm(op.apply_Bstar(f)), 2)).epsilon(1e-10));
    }
}

TEST_CASE("discrete and continuous adjoints agree under refinement") {
    std::vector<double> gaps;
    for (int k : {1, 2, 4}) {
        const HumOperator op(SpaceGrid(1.0, 10 * k), TimeGrid(1.0, 100 * k * k));
        const Signal f = smooth_signal(op.tgrid());
        const Signal d = op.apply_Bstar(f);
        const Signal c = op.apply_Bstar_continuous(f);
        std::vector<double> diff(d.size());
        for (std::size_t n = 0; n < diff.size(); ++n) diff[n] = d[n] - c[n];
        gaps.push_back(op.norm(Signal(op.tgrid(), diff)) / op.norm(c));
    }
    // observed first order in dx
    CHECK(std::log2(gaps[0] / gaps[1]) >= 0.9);
    CHECK(std::log2(gaps[1] / gaps[2]) >= 0.9);
    CHECK(gaps[2] <= 2e-2);
}

TEST_CASE("J gradient matches central differences") {
    const HumOperator op(SpaceGrid(1.0, 10), TimeGrid(1.0, 80));
    std::mt19937_64 rng(3);
    const Signal w = random_signal(op.tgrid(), rng);
    for (double eps : {0.0, 0.2}) {
        DualConfig cfg{op.xgrid(), op.tgrid(), eps};
        const Signal f = random_signal(op.tgrid(), rng);
        const JEvaluation j = eval_J(op, f, w, cfg);
        for (int k = 0; k < 5; ++k) {
            const Signal dir = random_signal(op.tgrid(), rng);
            const double h = 1e-5;
            const double fd = (eval_J(op, axpy(h, dir, f), w, cfg).value - eval_J(op, axpy(-h, dir, f), w, cfg).value) /
                              (2.0 * h);
            const double an = op.inner(j.gradient, dir);
            CHECK(std::abs(fd - an) <= 1e-5 * std::abs(an));
        }
    }
}

TEST_CASE("exact tracking gives a control no larger than the generating one") {
    const HumOperator op(SpaceGrid(1.0, 12), TimeGrid(1.0, 120));
    const ManufacturedTarget m = manufactured_target(op);
    CHECK(op.norm(m.w) == doctest::Approx(1.0).epsilon(1e-12));
    DualConfig cfg{op.xgrid(), op.tgrid(), 0.0};
    cfg.max_iters = 200;
    cfg.grad_tol = 1e-8;
    const HUMState st = minimize_J(op, m.w, cfg);
    CHECK(op.norm(st.Bstar_p) <= op.norm(m.v_star) * (1.0 + 1e-6));
    for (std::size_t k = 1; k < st.J_trace.size(); ++k) CHECK(st.J_trace[k] <= st.J_trace[k - 1] + 1e-14);
    CHECK(st.cg_condition_estimate >= 1.0);
}

TEST_CASE("approximate tracking within eps") {
    const HumOperator op(SpaceGrid(1.0, 20), TimeGrid(1.0, 200));
    const ManufacturedTarget m = manufactured_target(op);
    DualConfig cfg{op.xgrid(), op.tgrid(), 0.05};
    const HumResult r = synthesize_and_verify(m.w, cfg);
    CHECK(r.report.within_tolerance);
    CHECK(r.report.tracking_error_l2 <= 0.05 + 5e-3);
    CHECK(r.report.iterations <= 500);
    for (std::size_t k = 1; k < r.state.J_trace.size(); ++k) CHECK(r.state.J_trace[k] <= r.state.J_trace[k - 1] + 1e-14);
    // a larger slack never needs a larger control
    DualConfig loose = cfg;
    loose.eps = 0.2;
    const HumResult rl = synthesize_and_verify(m.w, loose);
    CHECK(rl.report.v_norm <= r.report.v_norm);
    CHECK(rl.report.tracking_error_l2 <= 0.2 + 5e-3);
}

TEST_CASE("zero target needs no control") {
    const HumOperator op(SpaceGrid(1.0, 10), TimeGrid(1.0, 50));
    for (double eps : {0.0, 0.1}) {
        DualConfig cfg{op.xgrid(), op.tgrid(), eps};
        const HUMState st = minimize_J(op, Signal(op.tgrid()), cfg);
        CHECK(op.norm(st.f) == 0.0);
        CHECK(op.norm(st.Bstar_p) == 0.0);
    }
}

TEST_CASE("dual solver input validation") {
    CHECK_THROWS_AS(HumOperator(SpaceGrid(1.0, 5), TimeGrid(1.0, 10)), Error);
    const HumOperator op(SpaceGrid(1.0, 10), TimeGrid(1.0, 50));
    DualConfig cfg{op.xgrid(), op.tgrid(), 0.1};
    cfg.smoothing_sigma = 1e-3;
    std::vector<double> ones(51, 1.0);
    CHECK_THROWS_AS(minimize_J(op, Signal(op.tgrid(), ones), cfg), Error);
    cfg.smoothing_sigma = 1e-8;
    cfg.eps = -1.0;
    CHECK_THROWS_AS(minimize_J(op, Signal(op.tgrid(), ones), cfg), Error);
    CHECK_THROWS_AS(op.forward(Signal(TimeGrid(1.0, 40))), Error);
}
