#include "heattrack/jet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>

#include "heattrack/error.hpp"
#include "heattrack/quadrature.hpp"

namespace heattrack {

namespace {

void require_compatible(const Jet& a, const Jet& b) {
    if (a.center() != b.center() || a.order() != b.order()) {
        throw Error(ErrorKind::InvalidInput, "jets must share center and order");
    }
}

constexpr double kEndpointGuard = 1e-12;

}  // namespace

Jet::Jet(double center, std::vector<double> coeffs) : center_(center), coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw Error(ErrorKind::InvalidOrder, "jet needs at least one coefficient");
}

Jet Jet::constant(double center, int order, double value) {
    std::vector<double> c(order + 1, 0.0);
    c[0] = value;
    return Jet(center, std::move(c));
}

Jet Jet::variable(double center, int order) {
    std::vector<double> c(order + 1, 0.0);
    c[0] = center;
    if (order >= 1) c[1] = 1.0;
    return Jet(center, std::move(c));
}

std::vector<double> Jet::derivatives() const {
    std::vector<double> d(coeffs_.size());
    double factorial = 1.0;
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
        if (k > 0) factorial *= static_cast<double>(k);
        d[k] = coeffs_[k] * factorial;
    }
    return d;
}

Jet operator+(const Jet& a, const Jet& b) {
    require_compatible(a, b);
    std::vector<double> c(a.coeffs().begin(), a.coeffs().end());
    for (int k = 0; k <= a.order(); ++k) c[k] += b[k];
    return Jet(a.center(), std::move(c));
}

Jet operator-(const Jet& a, const Jet& b) { return a + (-1.0) * b; }

Jet operator*(const Jet& a, const Jet& b) {
    require_compatible(a, b);
    const int n = a.order();
    std::vector<double> c(n + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
        double sum = 0.0;
        for (int j = 0; j <= k; ++j) sum += a[j] * b[k - j];
        c[k] = sum;
    }
    return Jet(a.center(), std::move(c));
}

Jet operator*(double s, const Jet& a) {
    std::vector<double> c(a.coeffs().begin(), a.coeffs().end());
    for (double& x : c) x *= s;
    return Jet(a.center(), std::move(c));
}

Jet add_constant(const Jet& a, double c0) {
    std::vector<double> c(a.coeffs().begin(), a.coeffs().end());
    c[0] += c0;
    return Jet(a.center(), std::move(c));
}

Jet exp(const Jet& u) {
    const int n = u.order();
    std::vector<double> e(n + 1, 0.0);
    e[0] = std::exp(u[0]);
    if (e[0] == 0.0) return Jet(u.center(), std::move(e));
    // e' = e u'  =>  k e_k = sum_{j=1..k} j u_j e_{k-j}
    for (int k = 1; k <= n; ++k) {
        double sum = 0.0;
        for (int j = 1; j <= k; ++j) sum += j * u[j] * e[k - j];
        e[k] = sum / k;
    }
    return Jet(u.center(), std::move(e));
}

Jet pow(const Jet& u, double alpha) {
    if (u[0] == 0.0) throw Error(ErrorKind::SingularJet, "power of a jet with zero constant term");
    const int n = u.order();
    std::vector<double> v(n + 1, 0.0);
    v[0] = std::pow(u[0], alpha);
    // v' u = alpha v u'  =>  k u_0 v_k = sum_{j=1..k} (alpha j - (k - j)) u_j v_{k-j}
    for (int k = 1; k <= n; ++k) {
        double sum = 0.0;
        for (int j = 1; j <= k; ++j) sum += (alpha * j - (k - j)) * u[j] * v[k - j];
        v[k] = sum / (k * u[0]);
    }
    return Jet(u.center(), std::move(v));
}

double GevreyBump::normalization() const { return std::exp(log_norm_); }

double GevreyBump::value(double t) const {
    if (t <= kEndpointGuard || t >= 1.0 - kEndpointGuard) return 0.0;
    const double alpha = 1.0 / (order_ - 1.0);
    return std::exp(log_norm_ - std::pow((1.0 - t) * t, -alpha));
}

GevreyBump normalize_bump(double r, int max_order) {
    if (!(r > 1.0) || !std::isfinite(r)) throw Error(ErrorKind::InvalidOrder, "bump Gevrey order must exceed 1");
    if (max_order < 0) throw Error(ErrorKind::InvalidOrder, "max_order must be nonnegative");
    const double alpha = 1.0 / (r - 1.0);
    // The exponent is smallest at t = 1/2, where it equals 4^alpha; integrate
    // exp(-(q - q_min)) so the integrand stays O(1) for any r.
    const double q_min = std::pow(4.0, alpha);
    auto shifted = [&](double t) {
        if (t <= kEndpointGuard || t >= 1.0 - kEndpointGuard) return 0.0;
        return std::exp(q_min - std::pow((1.0 - t) * t, -alpha));
    };
    const double mass = integrate_adaptive(shifted, 0.0, 1.0, 1e-13);
    return GevreyBump(r, q_min - std::log(mass), max_order);
}

Jet bump_jet(const GevreyBump& bump, double t, int order) {
    if (order > bump.max_order()) {
        throw Error(ErrorKind::OrderCap, "jet order " + std::to_string(order) + " exceeds N_max " +
                                             std::to_string(bump.max_order()));
    }
    if (t <= kEndpointGuard || t >= 1.0 - kEndpointGuard) return Jet::zero(t, order);
    const double alpha = 1.0 / (bump.gevrey_order() - 1.0);
    std::vector<double> u(order + 1, 0.0);
    u[0] = (1.0 - t) * t;
    if (order >= 1) u[1] = 1.0 - 2.0 * t;
    if (order >= 2) u[2] = -1.0;
    const Jet q = pow(Jet(t, std::move(u)), -alpha);
    if (bump.log_normalization() - q[0] < -745.0) return Jet::zero(t, order);
    Jet out = exp(add_constant((-1.0) * q, bump.log_normalization()));
    for (double c : out.coeffs()) {
        if (!std::isfinite(c)) return Jet::zero(t, order);  // deep in the flat tail
    }
    return out;
}

// ---------------------------------------------------------------------------
// Mollification

namespace {

constexpr int kNodesPerPanel = 16;
constexpr int kBasePanels = 8;
constexpr int kLevels = 7;  // 8 .. 512 panels
constexpr double kMollifierRelTol = 1e-10;

}  // namespace

struct BumpTables {
    struct Level {
        int panels = 0;
        std::vector<double> nodes;
        std::vector<double> weights;
        std::vector<double> derivs;  // derivs[q * stride + i] = xi^{(i)}(nodes[q])
    };

    BumpTables(const GevreyBump& b) : bump(b), stride(b.max_order() + 1), rule(gauss_legendre(kNodesPerPanel)) {}

    const Level& level(int k) const {
        std::call_once(flags[k], [&] { build(k); });
        return levels[k];
    }

    void build(int k) const {
        Level& lv = levels[k];
        lv.panels = kBasePanels << k;
        const GaussRule r = composite_rule(rule, 0.0, 1.0, lv.panels);
        lv.nodes = r.nodes;
        lv.weights = r.weights;
        lv.derivs.assign(lv.nodes.size() * stride, 0.0);
        for (std::size_t q = 0; q < lv.nodes.size(); ++q) {
            const auto d = bump_jet(bump, lv.nodes[q], bump.max_order()).derivatives();
            std::copy(d.begin(), d.end(), lv.derivs.begin() + static_cast<long>(q * stride));
        }
    }

    GevreyBump bump;
    std::size_t stride;
    GaussRule rule;
    mutable std::array<std::once_flag, kLevels> flags;
    mutable std::array<Level, kLevels> levels;
};

MollifiedTarget::MollifiedTarget(std::shared_ptr<const Target> base, double delta, GevreyBump bump)
    : base_(std::move(base)), delta_(delta), bump_(bump), tables_(std::make_shared<BumpTables>(bump)) {
    if (!base_) throw Error(ErrorKind::InvalidInput, "mollified target needs a base");
    if (!(delta > 0.0) || delta > base_->t_end()) {
        throw Error(ErrorKind::InvalidInput, "mollification width must lie in (0, T]");
    }
}

namespace {

// Accumulates sum_q W_q w(t - delta sigma_q) xi^{(i)}(sigma_q) over sigma in [0, a],
// plus the matching absolute sums.
void accumulate_level(const MollifiedTarget& m, const BumpTables::Level& lv, std::size_t stride, double t, double a,
                      int max_order, std::vector<double>& sum, std::vector<double>& abs_sum) {
    std::fill(sum.begin(), sum.end(), 0.0);
    std::fill(abs_sum.begin(), abs_sum.end(), 0.0);
    const Target& w = m.base();
    const double delta = m.delta();
    const int full_panels = a >= 1.0 ? lv.panels : static_cast<int>(std::floor(a * lv.panels));
    const std::size_t n_full = static_cast<std::size_t>(full_panels) * kNodesPerPanel;
    for (std::size_t q = 0; q < n_full; ++q) {
        const double wv = lv.weights[q] * w.value(t - delta * lv.nodes[q]);
        if (wv == 0.0) continue;
        const double* d = lv.derivs.data() + q * stride;
        for (int i = 0; i <= max_order; ++i) {
            const double term = wv * d[i];
            sum[i] += term;
            abs_sum[i] += std::abs(term);
        }
    }
    const double cut_lo = static_cast<double>(full_panels) / lv.panels;
    if (a < 1.0 && a > cut_lo) {
        // partial panel [cut_lo, a] ends at the kink of the zero extension
        static const GaussRule rule = gauss_legendre(kNodesPerPanel);
        const double half = 0.5 * (a - cut_lo);
        for (int q = 0; q < kNodesPerPanel; ++q) {
            const double sigma = cut_lo + half * (rule.nodes[q] + 1.0);
            const double wv = half * rule.weights[q] * w.value(t - delta * sigma);
            if (wv == 0.0) continue;
            const auto d = bump_jet(m.bump(), sigma, max_order).derivatives();
            for (int i = 0; i <= max_order; ++i) {
                const double term = wv * d[i];
                sum[i] += term;
                abs_sum[i] += std::abs(term);
            }
        }
    }
}

}  // namespace

std::vector<double> mollified_derivatives(const MollifiedTarget& m, double t, int max_order) {
    if (max_order > m.bump().max_order() || max_order < 0) {
        throw Error(ErrorKind::OrderCap, "derivative order " + std::to_string(max_order) + " exceeds N_max " +
                                             std::to_string(m.bump().max_order()));
    }
    std::vector<double> out(max_order + 1, 0.0);
    if (t <= 0.0) return out;
    const double a = std::min(t / m.delta(), 1.0);
    const BumpTables& tables = m.tables();

    std::vector<double> prev(max_order + 1);
    std::vector<double> cur(max_order + 1);
    std::vector<double> abs_sum(max_order + 1);
    accumulate_level(m, tables.level(0), tables.stride, t, a, max_order, prev, abs_sum);
    for (int k = 1; k < kLevels; ++k) {
        accumulate_level(m, tables.level(k), tables.stride, t, a, max_order, cur, abs_sum);
        bool converged = true;
        for (int i = 0; i <= max_order && converged; ++i) {
            converged = std::abs(cur[i] - prev[i]) <= kMollifierRelTol * (std::abs(cur[i]) + abs_sum[i]);
        }
        std::swap(prev, cur);
        if (converged) break;
    }
    // d_i = delta^{-i} * integral over sigma
    double scale = 1.0;
    for (int i = 0; i <= max_order; ++i) {
        out[i] = prev[i] * scale;
        scale /= m.delta();
    }
    return out;
}

GevreyCertificate gevrey_certificate(std::span<const std::vector<double>> derivs, double r) {
    if (derivs.empty()) return {0.0, 1.0};
    std::size_t n_orders = derivs.front().size();
    for (const auto& d : derivs) n_orders = std::min(n_orders, d.size());
    if (n_orders < 6) throw Error(ErrorKind::InvalidInput, "certificate needs derivatives up to order 5");
    // y_i = log M_i - r log i! = log C - i log R
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < n_orders; ++i) {
        double mi = 0.0;
        for (const auto& d : derivs) mi = std::max(mi, std::abs(d[i]));
        if (mi == 0.0) continue;
        const double x = static_cast<double>(i);
        const double y = std::log(mi) - r * std::lgamma(x + 1.0);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count == 0) return {0.0, 1.0};
    if (count == 1) return {std::exp(sy), 1.0};
    const double denom = count * sxx - sx * sx;
    const double slope = (count * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / count;
    return {std::exp(intercept), std::exp(-slope)};
}

}  // namespace heattrack
