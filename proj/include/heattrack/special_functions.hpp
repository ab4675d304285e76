#pragma once

#include <span>

namespace heattrack {

/// G_s(x) = sum_i x^i / (i!)^s, accumulated in log space.
struct GsEvaluation {
    double s;
    double x;
    double value;      // may be +inf when exp(log_value) overflows
    double log_value;  // always finite
    int terms_used;
    double tail_bound;  // geometric estimate of the omitted tail, relative to value
};

/// s in (0, 1]. Terms exp(i ln x - s lgamma(i+1)) are summed until 100
/// consecutive terms are each <= 1e-17 of the running sum and i > e x^{1/s}.
/// Throws OutOfRange when x^{1/s} > 1e8.
GsEvaluation gs_eval(double s, double x);

/// C exp(C x^{1/s}).
double gs_upper_bound(double s, double x, double C);

/// exp(s x^{1/s}); a lower bound of G_s for s in (0, 1).
double gs_lower_bound(double s, double x);

/// exp(s x^{1/s}); an upper bound of G_s for s >= 1.
double gs_closed_bound_s_ge_1(double s, double x);

/// Smallest C with log C + C x^{1/s} >= log G_s(x) at every sample.
double fit_gs_upper_constant(double s, std::span<const double> xs);

/// Exact big-integer check, for every i <= i_max, of
/// (i!)^2 (2i+1) C(2i,i) == (2i+1)!  and  C(2i,i) >= 2^i.
bool factorial_inequality_check(int i_max);

/// G_s'(x) = sum_i (i+1)^{1-s} x^i / (i!)^s, in log space.
double gs_derivative_log(double s, double x);

/// max over samples of G_s'(x) / (x^{(1-s)/s} G_s(x)). Requires x >= 1.
double gs_derivative_ratio_check(double s, std::span<const double> xs);

}  // namespace heattrack
