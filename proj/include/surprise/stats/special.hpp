#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "surprise/error.hpp"

// Special functions behind every p-value in the toolkit. erf/erfc come from
// <cmath>; the rest are series and continued-fraction expansions accurate to
// roughly 1e-14 relative on the tested points.
namespace surprise::stats {

/// log Gamma(x) for x > 0 (Lanczos, g = 7, n = 9). Reentrant, unlike lgamma.
inline double log_gamma(double x) {
    static constexpr double coef[9] = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        return std::log(std::numbers::pi / std::fabs(std::sin(std::numbers::pi * x))) - log_gamma(1.0 - x);
    }
    x -= 1.0;
    double a = coef[0];
    const double t = x + 7.5;
    for (int i = 1; i < 9; ++i) a += coef[i] / (x + i);
    return 0.5 * std::log(2.0 * std::numbers::pi) + (x + 0.5) * std::log(t) - t + std::log(a);
}

namespace detail {

inline constexpr int max_iterations = 100000;
inline constexpr double epsilon = 1e-16;
inline constexpr double tiny = 1e-300;

inline double gamma_series(double a, double x) {
    double sum = 1.0 / a;
    double term = sum;
    for (int n = 1; n < max_iterations; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * epsilon) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
inline double gamma_continued_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < max_iterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < epsilon) break;
    }
    return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

inline double beta_continued_fraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m < max_iterations; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < epsilon) break;
    }
    return h;
}

} // namespace detail

/// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
    require(a > 0.0 && x >= 0.0, "gamma_p domain");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_series(a, x);
    return 1.0 - detail::gamma_continued_fraction(a, x);
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), accurate in the tail.
inline double gamma_q(double a, double x) {
    require(a > 0.0 && x >= 0.0, "gamma_q domain");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_series(a, x);
    return detail::gamma_continued_fraction(a, x);
}

/// Regularized incomplete beta I_x(a, b).
inline double beta_inc(double a, double b, double x) {
    require(a > 0.0 && b > 0.0 && x >= 0.0 && x <= 1.0, "beta_inc domain");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front =
        log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

/// Two-sided normal p-value.
inline double normal_two_sided(double z) { return std::erfc(std::fabs(z) / std::numbers::sqrt2); }

/// Inverse of normal_cdf: Acklam's rational approximation polished by one Halley step.
inline double normal_quantile(double p) {
    require(p > 0.0 && p < 1.0, "normal_quantile needs p in (0, 1)");
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double low = 0.02425;
    double x;
    if (p < low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = (p < 0.5 ? normal_cdf(x) - p : -(normal_sf(x) - (1.0 - p)));
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

/// Upper tail P(T > t) of Student's t with `df` degrees of freedom.
inline double student_t_sf(double t, double df) {
    require(df > 0.0, "t distribution needs df > 0");
    if (std::isinf(df)) return normal_sf(t);
    const double x = df / (df + t * t);
    const double tail = 0.5 * beta_inc(0.5 * df, 0.5, x);
    return t >= 0.0 ? tail : 1.0 - tail;
}

inline double student_t_cdf(double t, double df) { return student_t_sf(-t, df); }

inline double student_t_two_sided(double t, double df) {
    require(df > 0.0, "t distribution needs df > 0");
    if (std::isinf(df)) return normal_two_sided(t);
    return beta_inc(0.5 * df, 0.5, df / (df + t * t));
}

/// Quantile of Student's t, by bisection on the cdf.
inline double student_t_quantile(double p, double df) {
    require(p > 0.0 && p < 1.0, "t quantile needs p in (0, 1)");
    if (p == 0.5) return 0.0;
    if (p < 0.5) return -student_t_quantile(1.0 - p, df);
    double lo = 0.0;
    double hi = std::max(2.0, 2.0 * normal_quantile(p));
    while (student_t_cdf(hi, df) < p) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (student_t_cdf(mid, df) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Upper tail of the chi-squared distribution.
inline double chi2_sf(double x, double df) {
    require(df > 0.0, "chi-squared needs df > 0");
    if (x <= 0.0) return 1.0;
    return gamma_q(0.5 * df, 0.5 * x);
}

/// Upper tail of the F distribution.
inline double f_sf(double f, double df1, double df2) {
    require(df1 > 0.0 && df2 > 0.0, "F distribution needs positive df");
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    return beta_inc(0.5 * df2, 0.5 * df1, df2 / (df2 + df1 * f));
}

inline constexpr double z_975 = 1.959963984540054;

} // namespace surprise::stats
