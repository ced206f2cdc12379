#pragma once

// Bivariate copula family kernels in their unrotated, exchangeable form.
// Each family provides cdf, log-density, the h-function h(u|v) = dC/dv and,
// where closed form exists, its inverse. Rotations are layered on top in
// bicop.hpp by argument reflection.

#include <cmath>
#include <limits>

#include "tailvine/math/quadrature.hpp"
#include "tailvine/math/special.hpp"

namespace tailvine::bicop_detail {

// ---------------------------------------------------------------- gaussian

inline double gauss_h(double u, double v, double rho) {
    double x = norm_quantile(u), y = norm_quantile(v);
    return norm_cdf((x - rho * y) / std::sqrt(1.0 - rho * rho));
}

inline double gauss_hinv(double w, double v, double rho) {
    double y = norm_quantile(v);
    double x = std::sqrt(1.0 - rho * rho) * norm_quantile(w) + rho * y;
    return norm_cdf(x);
}

inline double gauss_log_pdf(double u, double v, double rho) {
    double x = norm_quantile(u), y = norm_quantile(v);
    double r2 = 1.0 - rho * rho;
    return -0.5 * std::log(r2) -
           (rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * r2);
}

// Plackett's identity: dC/drho is the bivariate normal density, so the cdf
// is u*v plus the integral of that density over correlations [0, rho].
inline double gauss_cdf(double u, double v, double rho) {
    double x = norm_quantile(u), y = norm_quantile(v);
    auto dens = [&](double t) {
        double r2 = 1.0 - t * t;
        return std::exp(-(x * x - 2.0 * t * x * y + y * y) / (2.0 * r2)) /
               (2.0 * 3.14159265358979323846 * std::sqrt(r2));
    };
    double c = u * v + integrate(dens, 0.0, rho, 1e-14);
    return std::min(1.0, std::max(0.0, c));
}

// ---------------------------------------------------------------- student t

inline double t_h(double u, double v, double rho, double nu) {
    double x = t_quantile(u, nu), y = t_quantile(v, nu);
    double denom = std::sqrt((nu + y * y) * (1.0 - rho * rho) / (nu + 1.0));
    return t_cdf((x - rho * y) / denom, nu + 1.0);
}

inline double t_hinv(double w, double v, double rho, double nu) {
    double y = t_quantile(v, nu);
    double denom = std::sqrt((nu + y * y) * (1.0 - rho * rho) / (nu + 1.0));
    double x = t_quantile(w, nu + 1.0) * denom + rho * y;
    return t_cdf(x, nu);
}

inline double t_log_pdf_xy(double x, double y, double rho, double nu) {
    double r2 = 1.0 - rho * rho;
    double quad = (x * x - 2.0 * rho * x * y + y * y) / (nu * r2);
    return std::lgamma(0.5 * (nu + 2.0)) + std::lgamma(0.5 * nu) -
           2.0 * std::lgamma(0.5 * (nu + 1.0)) - 0.5 * std::log(r2) -
           0.5 * (nu + 2.0) * std::log1p(quad) +
           0.5 * (nu + 1.0) * (std::log1p(x * x / nu) + std::log1p(y * y / nu));
}

inline double t_log_pdf(double u, double v, double rho, double nu) {
    return t_log_pdf_xy(t_quantile(u, nu), t_quantile(v, nu), rho, nu);
}

inline double t_cdf2(double u, double v, double rho, double nu) {
    // integrate the h-function over the conditioning argument
    auto f = [&](double t) { return t_h(u, t, rho, nu); };
    double c = integrate(f, 0.0, v, 1e-13);
    return std::min(1.0, std::max(0.0, c));
}

// ---------------------------------------------------------------- clayton

inline double clayton_lnT(double u, double v, double theta) {
    // ln(u^-t + v^-t - 1), computed around the larger exponent
    double a = -theta * std::log(u), b = -theta * std::log(v);
    double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m) - std::exp(-m));
}

inline double clayton_cdf(double u, double v, double theta) {
    return std::exp(-clayton_lnT(u, v, theta) / theta);
}

inline double clayton_log_pdf(double u, double v, double theta) {
    return std::log1p(theta) - (theta + 1.0) * (std::log(u) + std::log(v)) -
           (2.0 + 1.0 / theta) * clayton_lnT(u, v, theta);
}

inline double clayton_h(double u, double v, double theta) {
    return std::exp(-(theta + 1.0) * std::log(v) -
                    (1.0 + 1.0 / theta) * clayton_lnT(u, v, theta));
}

inline double clayton_hinv(double w, double v, double theta) {
    double inner = std::exp(-theta * std::log(v)) *
                       std::expm1(-theta / (theta + 1.0) * std::log(w)) +
                   1.0;
    return std::exp(-std::log(inner) / theta);
}

// ---------------------------------------------------------------- gumbel

inline double gumbel_lnS(double u, double v, double theta, double& llu, double& llv) {
    llu = std::log(-std::log(u));
    llv = std::log(-std::log(v));
    return log_sum_exp(theta * llu, theta * llv);
}

inline double gumbel_cdf(double u, double v, double theta) {
    double llu, llv;
    double lns = gumbel_lnS(u, v, theta, llu, llv);
    return std::exp(-std::exp(lns / theta));
}

inline double gumbel_h(double u, double v, double theta) {
    double llu, llv;
    double lns = gumbel_lnS(u, v, theta, llu, llv);
    double log_h = -std::exp(lns / theta) + (1.0 / theta - 1.0) * lns +
                   (theta - 1.0) * llv - std::log(v);
    return std::exp(log_h);
}

inline double gumbel_log_pdf(double u, double v, double theta) {
    double llu, llv;
    double lns = gumbel_lnS(u, v, theta, llu, llv);
    return -std::exp(lns / theta) + (2.0 / theta - 2.0) * lns +
           (theta - 1.0) * (llu + llv) - std::log(u) - std::log(v) +
           std::log1p((theta - 1.0) * std::exp(-lns / theta));
}

// ---------------------------------------------------------------- frank

inline double frank_cdf(double u, double v, double theta) {
    double a = std::expm1(-theta);
    double num = std::expm1(-theta * u) * std::expm1(-theta * v);
    return -std::log1p(num / a) / theta;
}

inline double frank_h(double u, double v, double theta) {
    double a = std::expm1(-theta);
    double bu = std::expm1(-theta * u), bv = std::expm1(-theta * v);
    return std::exp(-theta * v) * bu / (a + bu * bv);
}

inline double frank_hinv(double w, double v, double theta) {
    double a = std::expm1(-theta);
    double bv = std::expm1(-theta * v);
    double t = w * a / (std::exp(-theta * v) - w * bv);
    return -std::log1p(t) / theta;
}

inline double frank_log_pdf(double u, double v, double theta) {
    double a = std::expm1(-theta);
    double d = a + std::expm1(-theta * u) * std::expm1(-theta * v);
    return std::log(std::fabs(theta)) + std::log(std::fabs(a)) - theta * (u + v) -
           2.0 * std::log(std::fabs(d));
}

// ---------------------------------------------------------------- joe

inline double joe_lnA(double u, double v, double theta, double& lxu, double& lxv) {
    // A = (1-u)^t + (1-v)^t - (1-u)^t (1-v)^t, in (0, 1]
    lxu = theta * std::log1p(-u);
    lxv = theta * std::log1p(-v);
    return log_sum_exp(lxu + log1mexp(lxv), lxv);
}

inline double joe_cdf(double u, double v, double theta) {
    double lxu, lxv;
    double lna = joe_lnA(u, v, theta, lxu, lxv);
    return -std::expm1(lna / theta);
}

inline double joe_h(double u, double v, double theta) {
    double lxu, lxv;
    double lna = joe_lnA(u, v, theta, lxu, lxv);
    double log_h = (1.0 / theta - 1.0) * lna +
                   (theta - 1.0) * std::log1p(-v) + log1mexp(lxu);
    return std::exp(log_h);
}

inline double joe_log_pdf(double u, double v, double theta) {
    double lxu, lxv;
    double lna = joe_lnA(u, v, theta, lxu, lxv);
    double a = std::exp(lna);
    return (1.0 / theta - 2.0) * lna +
           (theta - 1.0) * (std::log1p(-u) + std::log1p(-v)) +
           std::log(theta - 1.0 + a);
}

inline double joe_tau(double theta) {
    if (theta <= 1.0) return 0.0;
    auto integrand = [theta](double t) {
        double ls = std::log1p(-t); // ln(1-t)
        double a = theta * ls;      // ln s^theta
        double st = std::exp(a);
        if (st < 1e-10) {
            // g ln(g)/ (theta s^(theta-1)) -> -(s/theta)(1-st)(1+st/2)
            return -(1.0 - t) / theta * (1.0 - st) * (1.0 + 0.5 * st);
        }
        double g = -std::expm1(a);
        double ln_g = log1mexp(a);
        return g * ln_g * std::exp(-(theta - 1.0) * ls) / theta;
    };
    return 1.0 + 4.0 * integrate(integrand, 0.0, 1.0, 1e-12);
}

// ---------------------------------------------------------------- bb1
// generator phi(t) = (t^-theta - 1)^delta

inline double bb1_lg(double t, double theta) {
    // ln(t^-theta - 1)
    double a = -theta * std::log(t);
    return a + log1mexp(-a);
}

// ln(-phi'(t))
inline double bb1_lphip(double t, double theta, double delta) {
    return std::log(theta * delta) - (theta + 1.0) * std::log(t) +
           (delta - 1.0) * bb1_lg(t, theta);
}

// ln(phi''(t))
inline double bb1_lphipp(double t, double theta, double delta) {
    double a = -theta * std::log(t);
    double lg = a + log1mexp(-a);
    double lnB = (delta == 1.0)
                     ? std::log(theta + 1.0) + lg
                     : log_sum_exp(std::log(theta + 1.0) + lg,
                                   a + std::log(theta * (delta - 1.0)));
    return std::log(theta * delta) - (theta + 2.0) * std::log(t) +
           (delta - 2.0) * lg + lnB;
}

struct Bb1Eval {
    double ln1pq;  // ln(1 + s^(1/delta))
    double lns;    // ln(phi(u) + phi(v))
    double log_c;  // ln C(u,v)
};

inline Bb1Eval bb1_core(double u, double v, double theta, double delta) {
    double lns = log_sum_exp(delta * bb1_lg(u, theta), delta * bb1_lg(v, theta));
    double lq = lns / delta;
    double ln1pq = lq > 36.0 ? lq : std::log1p(std::exp(lq));
    return {ln1pq, lns, -ln1pq / theta};
}

inline double bb1_cdf(double u, double v, double theta, double delta) {
    return std::exp(bb1_core(u, v, theta, delta).log_c);
}

inline double bb1_h(double u, double v, double theta, double delta) {
    auto e = bb1_core(u, v, theta, delta);
    // at C: ln t = log_c, lg(C) = lns/delta
    double lphip_c = std::log(theta * delta) - (theta + 1.0) * e.log_c +
                     (delta - 1.0) * e.lns / delta;
    return std::exp(bb1_lphip(v, theta, delta) - lphip_c);
}

inline double bb1_log_pdf(double u, double v, double theta, double delta) {
    auto e = bb1_core(u, v, theta, delta);
    double lgc = e.lns / delta;
    double lphip_c = std::log(theta * delta) - (theta + 1.0) * e.log_c +
                     (delta - 1.0) * lgc;
    double lnB = (delta == 1.0)
                     ? std::log(theta + 1.0) + lgc
                     : log_sum_exp(std::log(theta + 1.0) + lgc,
                                   e.ln1pq + std::log(theta * (delta - 1.0)));
    double lphipp_c = std::log(theta * delta) - (theta + 2.0) * e.log_c +
                      (delta - 2.0) * lgc + lnB;
    return lphipp_c + bb1_lphip(u, theta, delta) + bb1_lphip(v, theta, delta) -
           3.0 * lphip_c;
}

// ---------------------------------------------------------------- bb8
// generator phi(t) = -ln[(1-(1-delta t)^theta) / (1-(1-delta)^theta)]

inline double bb8_lgb(double t, double theta, double delta) {
    // ln(1 - (1 - delta t)^theta)
    return log1mexp(theta * std::log1p(-delta * t));
}

inline double bb8_lphip(double t, double theta, double delta) {
    return std::log(theta * delta) + (theta - 1.0) * std::log1p(-delta * t) -
           bb8_lgb(t, theta, delta);
}

struct Bb8Eval {
    double lp;   // ln g(C) = lgb(u) + lgb(v) - ln eta
    double cval; // C(u,v)
};

inline Bb8Eval bb8_core(double u, double v, double theta, double delta) {
    double lneta = log1mexp(theta * std::log1p(-delta));
    double lp = bb8_lgb(u, theta, delta) + bb8_lgb(v, theta, delta) - lneta;
    double c = -std::expm1(log1mexp(lp) / theta) / delta;
    return {lp, c};
}

inline double bb8_cdf(double u, double v, double theta, double delta) {
    return bb8_core(u, v, theta, delta).cval;
}

inline double bb8_h(double u, double v, double theta, double delta) {
    auto e = bb8_core(u, v, theta, delta);
    double l1mdc = log1mexp(e.lp) / theta; // ln(1 - delta*C)
    double lphip_c = std::log(theta * delta) + (theta - 1.0) * l1mdc - e.lp;
    return std::exp(bb8_lphip(v, theta, delta) - lphip_c);
}

inline double bb8_log_pdf(double u, double v, double theta, double delta) {
    auto e = bb8_core(u, v, theta, delta);
    double l1mdc = log1mexp(e.lp) / theta;
    double lphip_c = std::log(theta * delta) + (theta - 1.0) * l1mdc - e.lp;
    double lphipp_c = std::log(theta * delta * delta) + (theta - 2.0) * l1mdc +
                      std::log(theta - std::exp(e.lp)) - 2.0 * e.lp;
    return lphipp_c + bb8_lphip(u, theta, delta) + bb8_lphip(v, theta, delta) -
           3.0 * lphip_c;
}

inline double bb8_tau(double theta, double delta) {
    if (delta >= 1.0) return joe_tau(theta);
    // phi(t) = ln(eta/g(t)) rewritten as log1p((eta - g)/g) with
    // eta - g = (1-delta)^theta expm1(theta ln((1-delta t)/(1-delta)))
    // to stay accurate while phi -> 0 near t = 1
    const double lB = theta * std::log1p(-delta);
    const double B = std::exp(lB);
    auto integrand = [=](double t) {
        double g = -std::expm1(theta * std::log1p(-delta * t));
        double r = delta * (1.0 - t) / (1.0 - delta);
        double phi = std::log1p(B * std::expm1(theta * std::log1p(r)) / g);
        double gprime = theta * delta * std::exp((theta - 1.0) * std::log1p(-delta * t));
        return -phi * g / gprime;
    };
    return 1.0 + 4.0 * integrate(integrand, 0.0, 1.0, 1e-12);
}

// ------------------------------------------------------------ survival tails
// hbar(s | v) = 1 - h(1-s | v), expanded so that values far below double
// subtraction accuracy (s ~ 1e-300) keep full relative precision. Each form
// is an exact algebraic rewrite, not a truncated series.

inline double gauss_hbar(double s, double v, double rho) {
    double y = norm_quantile(v);
    double x = -norm_quantile(s); // = Phi^-1(1-s), exact in the far tail
    return norm_cdf((rho * y - x) / std::sqrt(1.0 - rho * rho));
}

inline double t_hbar(double s, double v, double rho, double nu) {
    double y = t_quantile(v, nu);
    double x = -t_quantile(s, nu);
    double denom = std::sqrt((nu + y * y) * (1.0 - rho * rho) / (nu + 1.0));
    return t_cdf((rho * y - x) / denom, nu + 1.0);
}

inline double clayton_hbar(double s, double v, double theta) {
    // h(u|v) = (1 + (u^-t - 1) v^t)^(-(t+1)/t) with u = 1-s
    double de = std::expm1(-theta * std::log1p(-s));
    double vt = std::exp(theta * std::log(v));
    return -std::expm1(-(1.0 + 1.0 / theta) * std::log1p(de * vt));
}

inline double gumbel_hbar(double s, double v, double theta) {
    double lu = -std::log1p(-s);
    double lv = -std::log(v);
    double r = std::exp(theta * (std::log(lu) - std::log(lv)));
    double log_h = -lv * std::expm1(std::log1p(r) / theta) +
                   (1.0 / theta - 1.0) * std::log1p(r);
    return -std::expm1(log_h);
}

inline double frank_hbar(double s, double v, double theta) {
    double a = std::expm1(-theta);
    double bu = std::expm1(-theta * (1.0 - s));
    double bv = std::expm1(-theta * v);
    return -std::exp(-theta) * std::expm1(theta * s) / (a + bu * bv);
}

inline double joe_hbar(double s, double v, double theta) {
    double st = std::exp(theta * std::log(s));
    double vbt = std::exp(theta * std::log1p(-v));
    double e = (1.0 / theta - 1.0) * std::log1p(st * (1.0 - vbt) / vbt) +
               std::log1p(-st);
    return -std::expm1(e);
}

inline double bb1_hbar(double s, double v, double theta, double delta) {
    double lgu = std::log(std::expm1(-theta * std::log1p(-s)));
    double lgv = bb1_lg(v, theta);
    double q = std::log1p(std::exp(delta * (lgu - lgv))) / delta;
    double vt = std::exp(theta * std::log(v));
    double d = std::log1p((1.0 - vt) * std::expm1(q));
    double e = -(theta + 1.0) / theta * d - (delta - 1.0) * q;
    return -std::expm1(e);
}

inline double bb8_hbar(double s, double v, double theta, double delta) {
    double eps;
    if (delta >= 1.0) {
        eps = std::log1p(-std::exp(theta * std::log(s)));
    } else {
        double lB = theta * std::log1p(-delta);
        double eta = -std::expm1(lB);
        double ru = delta * s / (1.0 - delta);
        eps = std::log1p(-std::exp(lB) * std::expm1(theta * std::log1p(ru)) / eta);
    }
    double l1mdv = std::log1p(-delta * v);
    double gv = -std::expm1(theta * l1mdv);
    double e = -(theta - 1.0) / theta *
                   std::log1p(-gv * std::expm1(eps) * std::exp(-theta * l1mdv)) +
               eps;
    return -std::expm1(e);
}

} // namespace tailvine::bicop_detail
