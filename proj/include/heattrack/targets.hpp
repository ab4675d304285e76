#pragma once

#include <memory>

#include "heattrack/jet.hpp"
#include "heattrack/target.hpp"

namespace heattrack {

class ZeroTarget final : public Target {
public:
    explicit ZeroTarget(double t_end) : t_end_(t_end) {}
    double t_end() const override { return t_end_; }
    double value(double) const override { return 0.0; }
    bool has_derivatives() const override { return true; }
    std::vector<double> derivatives(double, int order) const override { return std::vector<double>(order + 1, 0.0); }
    double w1inf_norm() const override { return 0.0; }

private:
    double t_end_;
};

/// w(t) = slope * t.
class RampTarget final : public Target {
public:
    RampTarget(double slope, double t_end) : slope_(slope), t_end_(t_end) {}
    double t_end() const override { return t_end_; }
    double value(double t) const override;
    bool has_derivatives() const override { return true; }
    std::vector<double> derivatives(double t, int order) const override;
    double w1inf_norm() const override;

private:
    double slope_;
    double t_end_;
};

/// w(t) = amplitude * sin(2 pi frequency t).
class SineTarget final : public Target {
public:
    SineTarget(double amplitude, double frequency, double t_end)
        : amplitude_(amplitude), frequency_(frequency), t_end_(t_end) {}
    double t_end() const override { return t_end_; }
    double value(double t) const override;
    bool has_derivatives() const override { return true; }
    std::vector<double> derivatives(double t, int order) const override;

private:
    double amplitude_;
    double frequency_;
    double t_end_;
};

/// w(t) = amplitude * int_0^{(t - onset)/width} xi(u) du: a smooth step that is
/// flat at t = 0 whenever onset >= 0, with Gevrey order that of the bump.
class BumpIntegralTarget final : public Target {
public:
    BumpIntegralTarget(double amplitude, double onset, double width, GevreyBump bump, double t_end);
    double t_end() const override { return t_end_; }
    double value(double t) const override;
    bool has_derivatives() const override { return true; }
    std::vector<double> derivatives(double t, int order) const override;
    const GevreyBump& bump() const noexcept { return bump_; }

private:
    double cumulative(double u) const;

    double amplitude_;
    double onset_;
    double width_;
    GevreyBump bump_;
    double t_end_;
    std::vector<double> table_;  // cumulative mass at u = k / (table_.size() - 1)
};

/// Sampled target with piecewise-cubic reconstruction between nodes.
class SampledTarget final : public Target {
public:
    explicit SampledTarget(Signal samples) : samples_(std::move(samples)) {}
    double t_end() const override { return samples_.grid().t_end(); }
    double value(double t) const override { return t < 0.0 ? 0.0 : samples_.sample(t); }
    double w1inf_norm() const override { return signal_norm(samples_, NormKind::W1Inf); }
    const Signal& samples() const noexcept { return samples_; }

private:
    Signal samples_;
};

/// a * w1 + b * w2 on a shared horizon.
class LinearCombinationTarget final : public Target {
public:
    LinearCombinationTarget(double a, std::shared_ptr<const Target> w1, double b, std::shared_ptr<const Target> w2);
    double t_end() const override { return w1_->t_end(); }
    double value(double t) const override { return a_ * w1_->value(t) + b_ * w2_->value(t); }
    bool has_derivatives() const override { return w1_->has_derivatives() && w2_->has_derivatives(); }
    std::vector<double> derivatives(double t, int order) const override;

private:
    double a_;
    std::shared_ptr<const Target> w1_;
    double b_;
    std::shared_ptr<const Target> w2_;
};

}  // namespace heattrack
