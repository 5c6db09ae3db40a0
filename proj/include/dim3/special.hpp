#pragma once

#include <cmath>
#include <limits>
#include <span>

#include "dim3/common.hpp"

namespace dim3 {

inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// log Gamma(a+n)/Gamma(a) for integer n >= 0.
inline double log_rising(double a, int n) {
    if (n == 0) return 0.0;
    if (n < 8) {
        double s = 0.0;
        for (int m = 0; m < n; ++m) s += std::log(a + m);
        return s;
    }
    return std::lgamma(a + n) - std::lgamma(a);
}

inline double digamma(double x) {
    if (!(x > 0.0)) throw NumericError("digamma: domain");
    double r = 0.0;
    while (x < 6.0) {
        r -= 1.0 / x;
        x += 1.0;
    }
    double f = 1.0 / (x * x);
    return r + std::log(x) - 0.5 / x -
           f * (1.0 / 12.0 - f * (1.0 / 120.0 - f * (1.0 / 252.0 - f * (1.0 / 240.0 - f / 132.0))));
}

inline double logsumexp(std::span<const double> v) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : v)
        if (x > mx) mx = x;
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

namespace detail {

// Continued fraction for the regularized incomplete beta (Lentz).
inline double betacf(double a, double b, double x) {
    const double eps = 3e-14, fpmin = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace detail

inline double inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double lnb = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                 a * std::log(x) + b * std::log1p(-x);
    if (x < (a + 1.0) / (a + b + 2.0))
        return std::exp(lnb) * detail::betacf(a, b, x) / a;
    return 1.0 - std::exp(lnb) * detail::betacf(b, a, 1.0 - x) / b;
}

// Upper-tail quantile of the F distribution by bisection on the CDF.
inline double f_quantile(double p, double df1, double df2) {
    if (!(p > 0.0 && p < 1.0)) throw NumericError("f_quantile: p in (0,1)");
    auto cdf = [&](double f) { return inc_beta(df1 / 2.0, df2 / 2.0, df1 * f / (df1 * f + df2)); };
    double lo = 0.0, hi = 1.0;
    while (cdf(hi) < p && hi < 1e12) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (cdf(mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace dim3
