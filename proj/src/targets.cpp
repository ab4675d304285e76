#include "heattrack/targets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "heattrack/error.hpp"
#include "heattrack/quadrature.hpp"

namespace heattrack {

std::vector<double> Target::derivatives(double, int) const {
    throw Error(ErrorKind::InvalidInput, "target has no closed-form derivatives");
}

double Target::w1inf_norm() const {
    const TimeGrid grid(t_end(), 4000);
    if (!has_derivatives()) return signal_norm(sample(grid), NormKind::W1Inf);
    double norm = 0.0;
    for (int i = 0; i <= grid.n_steps(); ++i) {
        const auto d = derivatives(grid.node(i), 1);
        norm = std::max({norm, std::abs(d[0]), std::abs(d[1])});
    }
    return norm;
}

Signal Target::sample(const TimeGrid& grid) const {
    std::vector<double> v(grid.size());
    for (int i = 0; i <= grid.n_steps(); ++i) v[i] = value(grid.node(i));
    return Signal(grid, std::move(v));
}

double RampTarget::value(double t) const { return t < 0.0 ? 0.0 : slope_ * std::min(t, t_end_); }

std::vector<double> RampTarget::derivatives(double t, int order) const {
    std::vector<double> d(order + 1, 0.0);
    if (t < 0.0) return d;
    d[0] = slope_ * t;
    if (order >= 1) d[1] = slope_;
    return d;
}

double RampTarget::w1inf_norm() const { return std::abs(slope_) * std::max(1.0, t_end_); }

double SineTarget::value(double t) const {
    if (t < 0.0) return 0.0;
    return amplitude_ * std::sin(2.0 * std::numbers::pi * frequency_ * std::min(t, t_end_));
}

std::vector<double> SineTarget::derivatives(double t, int order) const {
    std::vector<double> d(order + 1, 0.0);
    if (t < 0.0) return d;
    const double omega = 2.0 * std::numbers::pi * frequency_;
    double scale = amplitude_;
    for (int i = 0; i <= order; ++i) {
        // i-th derivative of sin is sin(x + i pi / 2)
        d[i] = scale * std::sin(omega * t + i * 0.5 * std::numbers::pi);
        scale *= omega;
    }
    return d;
}

BumpIntegralTarget::BumpIntegralTarget(double amplitude, double onset, double width, GevreyBump bump, double t_end)
    : amplitude_(amplitude), onset_(onset), width_(width), bump_(bump), t_end_(t_end) {
    if (!(width > 0.0)) throw Error(ErrorKind::InvalidInput, "bump_integral width must be positive");
    constexpr int kTable = 2048;
    table_.assign(kTable + 1, 0.0);
    const GaussRule rule = gauss_legendre(20);
    for (int k = 0; k < kTable; ++k) {
        const double lo = static_cast<double>(k) / kTable;
        const double half = 0.5 / kTable;
        double sum = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) sum += rule.weights[q] * bump_.value(lo + half * (rule.nodes[q] + 1.0));
        table_[k + 1] = table_[k] + half * sum;
    }
}

double BumpIntegralTarget::cumulative(double u) const {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return table_.back();
    const int n = static_cast<int>(table_.size()) - 1;
    const int k = std::min(static_cast<int>(u * n), n - 1);
    const double lo = static_cast<double>(k) / n;
    static const GaussRule rule = gauss_legendre(10);
    const double half = 0.5 * (u - lo);
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) sum += rule.weights[q] * bump_.value(lo + half * (rule.nodes[q] + 1.0));
    return table_[k] + half * sum;
}

double BumpIntegralTarget::value(double t) const {
    if (t < 0.0) return 0.0;
    return amplitude_ * cumulative((std::min(t, t_end_) - onset_) / width_);
}

std::vector<double> BumpIntegralTarget::derivatives(double t, int order) const {
    std::vector<double> d(order + 1, 0.0);
    if (t < 0.0) return d;
    const double u = (t - onset_) / width_;
    d[0] = amplitude_ * cumulative(u);
    if (order == 0) return d;
    // w^{(i)} = amplitude * width^{-i} * xi^{(i-1)}(u)
    const auto xi = bump_jet(bump_, u, order - 1).derivatives();
    double scale = amplitude_ / width_;
    for (int i = 1; i <= order; ++i) {
        d[i] = scale * xi[i - 1];
        scale /= width_;
    }
    return d;
}

LinearCombinationTarget::LinearCombinationTarget(double a, std::shared_ptr<const Target> w1, double b,
                                                 std::shared_ptr<const Target> w2)
    : a_(a), w1_(std::move(w1)), b_(b), w2_(std::move(w2)) {
    if (w1_->t_end() != w2_->t_end()) throw Error(ErrorKind::IncompatibleGrid, "targets have different horizons");
}

std::vector<double> LinearCombinationTarget::derivatives(double t, int order) const {
    auto d = w1_->derivatives(t, order);
    const auto e = w2_->derivatives(t, order);
    for (int i = 0; i <= order; ++i) d[i] = a_ * d[i] + b_ * e[i];
    return d;
}

}  // namespace heattrack
