#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/differentiation/autodiff.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <memory>

#include "heattrack/error.hpp"
#include "heattrack/jet.hpp"
#include "heattrack/targets.hpp"

using namespace heattrack;
namespace ad = boost::math::differentiation;

namespace {

constexpr int kAdOrder = 24;

using Wide = boost::multiprecision::cpp_bin_float_50;

// Independent derivative oracle: forward-mode autodiff of the bump formula in
// 50-digit arithmetic (in double, autodiff loses up to 1e-7 at order 24).
std::vector<double> autodiff_bump(const GevreyBump& bump, double t) {
    const Wide alpha = Wide(1) / (Wide(bump.gevrey_order()) - 1);
    const auto x = ad::make_fvar<Wide, kAdOrder>(Wide(t));
    const auto f = exp(Wide(bump.log_normalization()) - pow((1 - x) * x, -alpha));
    std::vector<double> d(kAdOrder + 1);
    for (int i = 0; i <= kAdOrder; ++i) d[i] = static_cast<double>(f.derivative(i));
    return d;
}

double rel_err(double a, double b, double scale) { return std::abs(a - b) / std::max(scale, 1e-300); }

}  // namespace

TEST_CASE("jet arithmetic against closed forms") {
    const double c = 0.3;
    const Jet t = Jet::variable(c, 10);
    const Jet e = exp(t);
    double fact = 1.0;
    for (int k = 0; k <= 10; ++k) {
        if (k > 0) fact *= k;
        CHECK(e[k] == doctest::Approx(std::exp(c) / fact).epsilon(1e-14));
    }
    // (1 + t)^2 = 1 + 2t + t^2 around c
    const Jet sq = add_constant(t, 1.0) * add_constant(t, 1.0);
    CHECK(sq[0] == doctest::Approx((1 + c) * (1 + c)));
    CHECK(sq[1] == doctest::Approx(2 * (1 + c)));
    CHECK(sq[2] == doctest::Approx(1.0));
    CHECK(sq[3] == 0.0);

    // pow(u, 1/2) squared recovers u
    const Jet u = add_constant(t, 2.0);
    const Jet r = pow(u, 0.5);
    const Jet back = r * r;
    for (int k = 0; k <= 10; ++k) CHECK(back[k] == doctest::Approx(u[k]).epsilon(1e-13));

    const std::vector<double> d = e.derivatives();
    for (double v : d) CHECK(v == doctest::Approx(std::exp(c)).epsilon(1e-13));
}

TEST_CASE("pow of a jet with zero constant term is singular") {
    const Jet t = Jet::variable(0.0, 4);
    try {
        pow(t, -0.5);
        FAIL("expected SingularJet");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SingularJet);
    }
}

TEST_CASE("bump normalization and symmetry") {
    CHECK_THROWS_AS(normalize_bump(1.0), Error);
    CHECK_THROWS_AS(normalize_bump(0.5), Error);
    boost::math::quadrature::tanh_sinh<double> integrator;
    for (double r : {1.2, 1.5, 1.8}) {
        const GevreyBump b = normalize_bump(r);
        const double mass = integrator.integrate([&](double t) { return b.value(t); }, 0.0, 1.0);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-11));
        for (double t : {0.1, 0.27, 0.45}) CHECK(b.value(t) == doctest::Approx(b.value(1.0 - t)).epsilon(1e-13));
        CHECK(b.value(0.0) == 0.0);
        CHECK(b.value(1.0) == 0.0);
        CHECK(b.value(-0.5) == 0.0);
    }
}

TEST_CASE("bump jets match autodiff") {
    for (double r : {1.3, 1.5, 1.7}) {
        const GevreyBump b = normalize_bump(r);
        for (double t : {0.2, 0.5, 0.63, 0.9}) {
            const std::vector<double> jet = bump_jet(b, t, kAdOrder).derivatives();
            const std::vector<double> oracle = autodiff_bump(b, t);
            for (int i = 0; i <= kAdOrder; ++i) CHECK(rel_err(jet[i], oracle[i], std::abs(oracle[i]) + 1e-300) <= 1e-11);
        }
    }
}

TEST_CASE("bump jet symmetry, support and order cap") {
    const GevreyBump b = normalize_bump(1.5, 30);
    const auto left = bump_jet(b, 0.3, 30).derivatives();
    const auto right = bump_jet(b, 0.7, 30).derivatives();
    for (int i = 0; i <= 30; ++i) {
        const double sign = i % 2 ? -1.0 : 1.0;
        CHECK(rel_err(left[i], sign * right[i], std::abs(left[i]) + 1e-300) <= 1e-11);
    }
    for (double t : {-0.1, 0.0, 1.0, 1.3}) {
        const Jet j = bump_jet(b, t, 10);
        for (double v : j.coeffs()) CHECK(v == 0.0);
    }
    try {
        bump_jet(b, 0.5, 31);
        FAIL("expected OrderCap");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OrderCap);
    }
}

TEST_CASE("mollified ramp derivatives follow the shifted bump") {
    // For w(t) = t extended by zero: w_delta^{(i)}(t) = delta^{1-i} xi^{(i-2)}(t / delta), i >= 2.
    const GevreyBump b = normalize_bump(1.5);
    const double delta = 0.1;
    const MollifiedTarget m(std::make_shared<RampTarget>(1.0, 1.0), delta, b);
    // The quadrature resolves the integral delta^{-i} int w(t - delta u) xi^{(i)}(u) du, so its
    // error scales with delta^{-i} sup|w| sup|xi^{(i)}|, not with the (often cancelling) result.
    std::vector<double> xi_sup(41, 0.0);
    for (int k = 1; k < 400; ++k) {
        const auto x = bump_jet(b, k / 400.0, 40).derivatives();
        for (int i = 0; i <= 40; ++i) xi_sup[i] = std::max(xi_sup[i], std::abs(x[i]));
    }
    for (double t : {0.013, 0.025, 0.05, 0.071, 0.2}) {
        const auto d = mollified_derivatives(m, t, 40);
        const auto xi = bump_jet(b, std::min(t / delta, 1.0), 38).derivatives();
        for (int i = 2; i <= 40; ++i) {
            const double exact = std::pow(delta, 1 - i) * xi[i - 2];
            const double scale = std::pow(delta, -i) * t * xi_sup[i];
            CHECK(std::abs(d[i] - exact) <= 1e-12 * scale);
        }
        if (t >= delta) {
            CHECK(d[0] == doctest::Approx(t - 0.5 * delta).epsilon(1e-12));
            CHECK(d[1] == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("mollified targets are flat at t = 0 and close to the target") {
    const GevreyBump b = normalize_bump(1.5);
    auto base = std::make_shared<SineTarget>(1.0, 1.0, 1.0);
    const double delta = 0.05;
    const MollifiedTarget m(base, delta, b);
    for (double v : mollified_derivatives(m, 0.0, 20)) CHECK(v == 0.0);
    double worst = 0.0;
    for (int k = 0; k <= 200; ++k) {
        const double t = k / 200.0;
        worst = std::max(worst, std::abs(mollified_derivatives(m, t, 0)[0] - base->value(t)));
    }
    CHECK(worst <= delta * base->w1inf_norm() + 1e-9);
}

TEST_CASE("Gevrey certificate recovers synthetic constants") {
    const double C = 3.0, R = 0.5, r = 1.5;
    std::vector<std::vector<double>> derivs(1, std::vector<double>(20));
    for (int i = 0; i < 20; ++i) derivs[0][i] = C * std::exp(r * std::lgamma(i + 1.0)) / std::pow(R, i);
    const GevreyCertificate cert = gevrey_certificate(derivs, r);
    CHECK(cert.C == doctest::Approx(C).epsilon(1e-9));
    CHECK(cert.R == doctest::Approx(R).epsilon(1e-9));

    std::vector<std::vector<double>> zeros(2, std::vector<double>(10, 0.0));
    const GevreyCertificate z = gevrey_certificate(zeros, r);
    CHECK(z.C == 0.0);
    std::vector<std::vector<double>> short_seq(1, std::vector<double>(4, 1.0));
    CHECK_THROWS_AS(gevrey_certificate(short_seq, r), Error);
}
