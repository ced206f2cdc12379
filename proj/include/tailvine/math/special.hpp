#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/polygamma.hpp>

#include "tailvine/math/quadrature.hpp"

namespace tailvine {

inline constexpr double kUnitEps = 1e-10;

// clamp a probability-integral value into the open unit interval
inline double clamp_unit(double u, double eps = kUnitEps) {
    return std::min(std::max(u, eps), 1.0 - eps);
}

inline double norm_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779399461;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline double norm_log_pdf(double x) {
    static const double log_sqrt_2pi = 0.9189385332046727417803297;
    return -0.5 * x * x - log_sqrt_2pi;
}

inline double norm_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

// Acklam's rational approximation refined by one Halley step; relative
// error below 1e-14 on (1e-300, 1-1e-16).
inline double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        throw std::domain_error("norm_quantile: p must lie in (0,1)");
    }
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p > 1.0 - plow) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    // Halley refinement
    double e = norm_cdf(x) - p;
    double u = e / norm_pdf(x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

inline double t_pdf(double x, double nu) {
    return boost::math::pdf(boost::math::students_t_distribution<double>(nu), x);
}

inline double t_cdf(double x, double nu) {
    return boost::math::cdf(boost::math::students_t_distribution<double>(nu), x);
}

inline double t_quantile(double p, double nu) {
    p = clamp_unit(p, 1e-300);
    return boost::math::quantile(boost::math::students_t_distribution<double>(nu), p);
}

inline double t_log_pdf(double x, double nu) {
    return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
           0.5 * std::log(nu * 3.14159265358979323846) -
           0.5 * (nu + 1.0) * std::log1p(x * x / nu);
}

// upper tail of the chi-square distribution
inline double chi2_sf(double x, double df) {
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

inline double gamma_p(double a, double x) { return boost::math::gamma_p(a, x); }
inline double gamma_p_inv(double a, double p) { return boost::math::gamma_p_inv(a, p); }
inline double digamma(double x) { return boost::math::digamma(x); }
inline double trigamma(double x) { return boost::math::polygamma(1, x); }

// log(1 - exp(x)) for x < 0
inline double log1mexp(double x) {
    return x > -0.6931471805599453 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

inline double log_sum_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return a + std::log1p(std::exp(b - a));
}

inline double logit(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("logit: argument must lie in (0,1)");
    return std::log(p / (1.0 - p));
}

inline double expit(double x) {
    if (x >= 0.0) {
        double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

// first Debye function D1(x) = (1/x) Int_0^x t/(e^t - 1) dt, x > 0
inline double debye1(double x) {
    if (x <= 0.0) throw std::domain_error("debye1: x must be positive");
    auto f = [](double t) { return t > 1e-8 ? t / std::expm1(t) : 1.0 - 0.5 * t; };
    return integrate(f, 0.0, x, 1e-13) / x;
}

// Kolmogorov distribution upper tail: P(sup|B(t)| > lambda)
inline double kolmogorov_sf(double lambda) {
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-16) break;
    }
    return std::min(1.0, std::max(0.0, 2.0 * sum));
}

} // namespace tailvine
