#pragma once

#include <memory>
#include <span>
#include <vector>

#include "heattrack/target.hpp"

namespace heattrack {

inline constexpr int kDefaultMaxOrder = 64;

/// Truncated Taylor expansion at `center`: coeffs[k] = f^{(k)}(center) / k!.
class Jet {
public:
    Jet(double center, std::vector<double> coeffs);

    static Jet constant(double center, int order, double value);
    /// Jet of the identity map t -> t at `center`.
    static Jet variable(double center, int order);
    static Jet zero(double center, int order) { return constant(center, order, 0.0); }

    double center() const noexcept { return center_; }
    int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    std::span<const double> coeffs() const noexcept { return coeffs_; }
    double operator[](int k) const noexcept { return coeffs_[k]; }

    /// f^{(k)}(center) = k! c_k for k = 0..order.
    std::vector<double> derivatives() const;

private:
    double center_;
    std::vector<double> coeffs_;
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);  // Cauchy product
Jet operator*(double s, const Jet& a);
Jet add_constant(const Jet& a, double c);
Jet exp(const Jet& u);
/// u^alpha for real alpha from (u^alpha)' u = alpha u^alpha u'. Throws
/// SingularJet when the constant term is zero.
Jet pow(const Jet& u, double alpha);

/// xi(t) = N_r exp(-((1-t) t)^{-1/(r-1)}) on (0, 1), zero elsewhere; unit mass.
class GevreyBump {
public:
    double gevrey_order() const noexcept { return order_; }
    /// log N_r. Stored in log form because N_r overflows for r close to 1.
    double log_normalization() const noexcept { return log_norm_; }
    double normalization() const;
    int max_order() const noexcept { return max_order_; }

    double value(double t) const;

private:
    friend GevreyBump normalize_bump(double r, int max_order);
    GevreyBump(double r, double log_norm, int max_order) : order_(r), log_norm_(log_norm), max_order_(max_order) {}

    double order_;
    double log_norm_;
    int max_order_;
};

/// Builds the bump for Gevrey order r > 1 with N_r from adaptive
/// Gauss-Legendre to 1e-12 relative.
GevreyBump normalize_bump(double r, int max_order = kDefaultMaxOrder);

/// Jet of xi at t. Zero jet outside (0, 1) and within 1e-12 of the endpoints.
Jet bump_jet(const GevreyBump& bump, double t, int order);

struct BumpTables;  // panel tables of xi^{(i)} at Gauss nodes, built lazily

/// w_delta = (w extended by zero) * xi_delta with xi_delta(t) = xi(t/delta)/delta.
class MollifiedTarget {
public:
    MollifiedTarget(std::shared_ptr<const Target> base, double delta, GevreyBump bump);

    const Target& base() const noexcept { return *base_; }
    std::shared_ptr<const Target> base_ptr() const noexcept { return base_; }
    double delta() const noexcept { return delta_; }
    const GevreyBump& bump() const noexcept { return bump_; }
    double t_end() const noexcept { return base_->t_end(); }

    /// Shared, thread-safe lazily-built quadrature tables.
    const BumpTables& tables() const noexcept { return *tables_; }

private:
    std::shared_ptr<const Target> base_;
    double delta_;
    GevreyBump bump_;
    std::shared_ptr<BumpTables> tables_;
};

/// d_i = w_delta^{(i)}(t), i = 0..max_order, by composite Gauss-Legendre on
/// the convolution integral. Panels are doubled until consecutive estimates
/// agree to 1e-10 relative to |d_i| + the absolute integral (the scale of
/// the cancellation); the integration interval is cut at the kink t' = 0.
std::vector<double> mollified_derivatives(const MollifiedTarget& m, double t, int max_order);

struct GevreyCertificate {
    double C;
    double R;
};

/// Least-squares fit of log max_t |w^{(i)}| = log C + r log(i!) - i log R over
/// i = 0..I. `derivs[k]` holds the derivative sequence at the k-th sample.
/// Diagnostic only; orders whose maximum is exactly zero are skipped.
GevreyCertificate gevrey_certificate(std::span<const std::vector<double>> derivs, double r);

}  // namespace heattrack
