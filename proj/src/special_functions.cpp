#include "heattrack/special_functions.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "heattrack/error.hpp"

namespace heattrack {

namespace {

// Terms peak near i = x^{1/s}; beyond this the summation would run for minutes.
constexpr double kMaxPeak = 1e8;

struct LogSeries {
    double log_sum;
    int terms;
    double log_last;
    double log_ratio;
};

// Sums exp(log_term(i)) for i = 0, 1, ... with a running log-sum-exp.
template <class LogTerm>
LogSeries sum_log_series(double s, double x, LogTerm&& log_term) {
    const double peak = std::pow(x, 1.0 / s) * std::numbers::e;
    double m = log_term(0);
    double acc = 1.0;  // sum = exp(m) * acc
    double log_prev = m;
    double log_last = m;
    int small_run = 0;
    int i = 1;
    const double log_small = std::log(1e-17);
    for (;; ++i) {
        const double lt = log_term(i);
        if (lt > m) {
            acc = acc * std::exp(m - lt) + 1.0;
            m = lt;
        } else {
            acc += std::exp(lt - m);
        }
        const double log_sum = m + std::log(acc);
        small_run = (lt - log_sum <= log_small) ? small_run + 1 : 0;
        log_prev = log_last;
        log_last = lt;
        if (small_run >= 100 && i > peak) break;
    }
    return {m + std::log(acc), i + 1, log_last, log_last - log_prev};
}

void require_s_range(double s, double x) {
    if (!(s > 0.0) || s > 1.0) throw Error(ErrorKind::OutOfRange, "G_s evaluation needs s in (0, 1]");
    if (!(x >= 0.0)) throw Error(ErrorKind::OutOfRange, "G_s evaluation needs x >= 0");
    if (std::pow(x, 1.0 / s) > kMaxPeak) {
        throw Error(ErrorKind::OutOfRange, "G_s(" + std::to_string(x) + ") at s = " + std::to_string(s) +
                                               " needs more than 1e8 series terms");
    }
}

}  // namespace

GsEvaluation gs_eval(double s, double x) {
    require_s_range(s, x);
    if (x == 0.0) return {s, x, 1.0, 0.0, 1, 0.0};
    const double lx = std::log(x);
    const auto series = sum_log_series(s, x, [&](int i) { return i * lx - s * std::lgamma(i + 1.0); });
    const double ratio = std::exp(series.log_ratio);
    const double tail = ratio < 1.0 ? std::exp(series.log_last - series.log_sum) / (1.0 - ratio)
                                    : std::numeric_limits<double>::infinity();
    return {s, x, std::exp(series.log_sum), series.log_sum, series.terms, tail};
}

double gs_upper_bound(double s, double x, double C) { return C * std::exp(C * std::pow(x, 1.0 / s)); }

double gs_lower_bound(double s, double x) { return std::exp(s * std::pow(x, 1.0 / s)); }

double gs_closed_bound_s_ge_1(double s, double x) {
    if (s < 1.0) throw Error(ErrorKind::OutOfRange, "closed bound holds for s >= 1");
    return std::exp(s * std::pow(x, 1.0 / s));
}

double fit_gs_upper_constant(double s, std::span<const double> xs) {
    double c_max = 0.0;
    for (double x : xs) {
        const double target = gs_eval(s, x).log_value;
        const double p = std::pow(x, 1.0 / s);
        // log C + C p is increasing in C; bisect on [lo, hi]
        double lo = 1e-12;
        double hi = 1.0;
        while (std::log(hi) + hi * p < target) hi *= 2.0;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (std::log(mid) + mid * p < target ? lo : hi) = mid;
        }
        c_max = std::max(c_max, hi);
    }
    return c_max;
}

bool factorial_inequality_check(int i_max) {
    using boost::multiprecision::cpp_int;
    cpp_int fact_i = 1;       // i!
    cpp_int fact_2i1 = 1;     // (2i+1)!
    cpp_int binom = 1;        // C(2i, i)
    cpp_int two_pow = 1;      // 2^i
    for (int i = 0; i <= i_max; ++i) {
        if (i > 0) {
            fact_i *= i;
            fact_2i1 *= (2 * i) * (2 * i + 1);
            binom = binom * (2 * i) * (2 * i - 1) / (i * i);  // C(2i,i) = C(2i-2,i-1) (2i)(2i-1)/i^2
            two_pow *= 2;
        }
        if (fact_i * fact_i * (2 * i + 1) * binom != fact_2i1) return false;
        if (binom < two_pow) return false;
    }
    return true;
}

double gs_derivative_log(double s, double x) {
    require_s_range(s, x);
    if (x == 0.0) return 0.0;
    const double lx = std::log(x);
    return sum_log_series(s, x, [&](int i) {
               return (1.0 - s) * std::log(i + 1.0) + i * lx - s * std::lgamma(i + 1.0);
           }).log_sum;
}

double gs_derivative_ratio_check(double s, std::span<const double> xs) {
    if (!(s > 0.0) || !(s < 1.0)) throw Error(ErrorKind::OutOfRange, "derivative ratio check needs s in (0, 1)");
    double ratio = 0.0;
    for (double x : xs) {
        if (x < 1.0) throw Error(ErrorKind::OutOfDomain, "derivative bound is stated for x >= 1");
        const double log_r = gs_derivative_log(s, x) - (1.0 - s) / s * std::log(x) - gs_eval(s, x).log_value;
        ratio = std::max(ratio, std::exp(log_r));
    }
    return ratio;
}

}  // namespace heattrack
