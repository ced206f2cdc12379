#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tailvine/math/optimize.hpp"
#include "tailvine/math/quadrature.hpp"
#include "tailvine/math/rng.hpp"
#include "tailvine/math/special.hpp"
#include "tailvine/math/stats.hpp"

namespace tailvine {

enum class MarginFamily {
    normal,
    log_normal,
    skew_normal,
    skew_student_t,
    gev,
    gamma,
    normal_mixture,
};

inline const char* margin_family_name(MarginFamily f) {
    switch (f) {
        case MarginFamily::normal: return "normal";
        case MarginFamily::log_normal: return "lognormal";
        case MarginFamily::skew_normal: return "skewnormal";
        case MarginFamily::skew_student_t: return "skewt";
        case MarginFamily::gev: return "gev";
        case MarginFamily::gamma: return "gamma";
        case MarginFamily::normal_mixture: return "normalmixture";
    }
    return "?";
}

inline MarginFamily margin_family_from_name(const std::string& s) {
    if (s == "normal") return MarginFamily::normal;
    if (s == "lognormal" || s == "log_normal") return MarginFamily::log_normal;
    if (s == "skewnormal" || s == "skew_normal") return MarginFamily::skew_normal;
    if (s == "skewt" || s == "skew_student_t") return MarginFamily::skew_student_t;
    if (s == "gev") return MarginFamily::gev;
    if (s == "gamma") return MarginFamily::gamma;
    if (s == "normalmixture" || s == "mixture" || s == "normal_mixture")
        return MarginFamily::normal_mixture;
    throw std::invalid_argument("unknown margin family: " + s);
}

// Univariate marginal model. Parameter layout:
//   normal         {mu, sigma}
//   log_normal     {mu_log, sigma_log}
//   skew_normal    {xi, omega, alpha}
//   skew_student_t {xi, omega, alpha, nu}
//   gev            {mu, sigma, shape}
//   gamma          {shape, rate}
//   normal_mixture {mu_1..mu_S, sigma_1..sigma_S, w_1..w_S}
struct MarginalModel {
    MarginFamily family = MarginFamily::normal;
    std::vector<double> params;
    double loglik = std::numeric_limits<double>::quiet_NaN();
    double norm_const = 0.0; // cached density normalization (quadrature cdfs)

    int mixture_size() const {
        return family == MarginFamily::normal_mixture
                   ? static_cast<int>(params.size() / 3)
                   : 0;
    }

    int n_free_params() const {
        switch (family) {
            case MarginFamily::normal:
            case MarginFamily::log_normal:
            case MarginFamily::gamma: return 2;
            case MarginFamily::skew_normal:
            case MarginFamily::gev: return 3;
            case MarginFamily::skew_student_t: return 4;
            case MarginFamily::normal_mixture: return 3 * mixture_size() - 1;
        }
        return 0;
    }

    void validate() const {
        auto positive = [&](double v, const char* what) {
            if (!(v > 0.0))
                throw std::domain_error(std::string(margin_family_name(family)) +
                                        ": " + what + " must be > 0");
        };
        switch (family) {
            case MarginFamily::normal:
            case MarginFamily::log_normal:
                if (params.size() != 2) throw std::domain_error("need 2 parameters");
                positive(params[1], "sigma");
                break;
            case MarginFamily::skew_normal:
                if (params.size() != 3) throw std::domain_error("need 3 parameters");
                positive(params[1], "omega");
                break;
            case MarginFamily::skew_student_t:
                if (params.size() != 4) throw std::domain_error("need 4 parameters");
                positive(params[1], "omega");
                if (!(params[3] > 1.0))
                    throw std::domain_error("skewt: nu must be > 1");
                break;
            case MarginFamily::gev:
                if (params.size() != 3) throw std::domain_error("need 3 parameters");
                positive(params[1], "sigma");
                break;
            case MarginFamily::gamma:
                if (params.size() != 2) throw std::domain_error("need 2 parameters");
                positive(params[0], "shape");
                positive(params[1], "rate");
                break;
            case MarginFamily::normal_mixture: {
                int S = mixture_size();
                if (S < 1 || params.size() != static_cast<std::size_t>(3 * S))
                    throw std::domain_error("mixture: need 3S parameters");
                double wsum = 0.0;
                for (int s = 0; s < S; ++s) {
                    positive(params[S + s], "sigma");
                    if (!(params[2 * S + s] > 0.0))
                        throw std::domain_error("mixture: weights must be > 0");
                    wsum += params[2 * S + s];
                }
                if (std::fabs(wsum - 1.0) > 1e-8)
                    throw std::domain_error("mixture: weights must sum to 1");
                break;
            }
        }
    }
};

namespace margin_detail {

inline double skew_normal_pdf(double x, double xi, double omega, double alpha) {
    double z = (x - xi) / omega;
    return 2.0 / omega * norm_pdf(z) * norm_cdf(alpha * z);
}

inline double skew_t_pdf(double x, double xi, double omega, double alpha, double nu) {
    double z = (x - xi) / omega;
    double scale = alpha * z * std::sqrt((nu + 1.0) / (nu + z * z));
    return 2.0 / omega * t_pdf(z, nu) * t_cdf(scale, nu + 1.0);
}

// integral of the standardized skew-normal density over (-inf, z]; the
// mass outside [-9.5, 9.5] is below 1e-19 and absorbed by the cached norm
inline double skew_normal_std_cdf(double z, double alpha) {
    const double lo = -9.5;
    if (z <= lo) return 0.0;
    auto f = [alpha](double s) { return 2.0 * norm_pdf(s) * norm_cdf(alpha * s); };
    return integrate(f, lo, std::min(z, 9.5), 1e-12);
}

// standardized skew-t cdf via the tangent substitution s = tan(w) so the
// heavy tails map onto a finite interval
inline double skew_t_std_cdf(double z, double alpha, double nu) {
    const double half_pi = 1.5707963267948966;
    auto f = [alpha, nu](double w) {
        double s = std::tan(w);
        double sec2 = 1.0 + s * s;
        double scale = alpha * s * std::sqrt((nu + 1.0) / (nu + s * s));
        return 2.0 * t_pdf(s, nu) * t_cdf(scale, nu + 1.0) * sec2;
    };
    double hi = std::atan(z);
    return integrate(f, -half_pi + 1e-12, hi, 1e-12);
}

inline double gev_cdf_std(double z, double shape) {
    if (std::fabs(shape) < 1e-8) return std::exp(-std::exp(-z));
    double t = 1.0 + shape * z;
    if (t <= 0.0) return shape > 0.0 ? 0.0 : 1.0;
    return std::exp(-std::pow(t, -1.0 / shape));
}

inline double gev_pdf_std(double z, double shape) {
    if (std::fabs(shape) < 1e-8) {
        double e = std::exp(-z);
        return e * std::exp(-e);
    }
    double t = 1.0 + shape * z;
    if (t <= 0.0) return 0.0;
    double tp = std::pow(t, -1.0 / shape);
    return std::pow(t, -1.0 / shape - 1.0) * std::exp(-tp);
}

} // namespace margin_detail

inline double margin_pdf(const MarginalModel& m, double x) {
    m.validate();
    const auto& p = m.params;
    switch (m.family) {
        case MarginFamily::normal:
            return norm_pdf((x - p[0]) / p[1]) / p[1];
        case MarginFamily::log_normal:
            if (x <= 0.0) return 0.0;
            return norm_pdf((std::log(x) - p[0]) / p[1]) / (p[1] * x);
        case MarginFamily::skew_normal:
            return margin_detail::skew_normal_pdf(x, p[0], p[1], p[2]);
        case MarginFamily::skew_student_t:
            return margin_detail::skew_t_pdf(x, p[0], p[1], p[2], p[3]);
        case MarginFamily::gev:
            return margin_detail::gev_pdf_std((x - p[0]) / p[1], p[2]) / p[1];
        case MarginFamily::gamma: {
            if (x <= 0.0) return 0.0;
            double shape = p[0], rate = p[1];
            return std::exp(shape * std::log(rate) + (shape - 1.0) * std::log(x) -
                            rate * x - std::lgamma(shape));
        }
        case MarginFamily::normal_mixture: {
            int S = m.mixture_size();
            double d = 0.0;
            for (int s = 0; s < S; ++s)
                d += p[2 * S + s] * norm_pdf((x - p[s]) / p[S + s]) / p[S + s];
            return d;
        }
    }
    return 0.0;
}

inline double margin_cdf(const MarginalModel& m, double x) {
    m.validate();
    const auto& p = m.params;
    switch (m.family) {
        case MarginFamily::normal:
            return norm_cdf((x - p[0]) / p[1]);
        case MarginFamily::log_normal:
            if (x <= 0.0) return 0.0;
            return norm_cdf((std::log(x) - p[0]) / p[1]);
        case MarginFamily::skew_normal: {
            double z = (x - p[0]) / p[1];
            double c = margin_detail::skew_normal_std_cdf(z, p[2]);
            double norm = m.norm_const > 0.0
                              ? m.norm_const
                              : margin_detail::skew_normal_std_cdf(9.5, p[2]);
            return std::min(1.0, std::max(0.0, c / norm));
        }
        case MarginFamily::skew_student_t: {
            double z = (x - p[0]) / p[1];
            double c = margin_detail::skew_t_std_cdf(z, p[2], p[3]);
            double norm =
                m.norm_const > 0.0
                    ? m.norm_const
                    : margin_detail::skew_t_std_cdf(
                          std::numeric_limits<double>::infinity(), p[2], p[3]);
            return std::min(1.0, std::max(0.0, c / norm));
        }
        case MarginFamily::gev:
            return margin_detail::gev_cdf_std((x - p[0]) / p[1], p[2]);
        case MarginFamily::gamma:
            if (x <= 0.0) return 0.0;
            return gamma_p(p[0], p[1] * x);
        case MarginFamily::normal_mixture: {
            int S = m.mixture_size();
            double c = 0.0;
            for (int s = 0; s < S; ++s)
                c += p[2 * S + s] * norm_cdf((x - p[s]) / p[S + s]);
            return c;
        }
    }
    return 0.0;
}

// upper-tail probability P(X > x) without the 1 - cdf cancellation
inline double margin_sf(const MarginalModel& m, double x) {
    m.validate();
    const auto& p = m.params;
    switch (m.family) {
        case MarginFamily::normal:
            return norm_cdf(-(x - p[0]) / p[1]);
        case MarginFamily::log_normal:
            if (x <= 0.0) return 1.0;
            return norm_cdf(-(std::log(x) - p[0]) / p[1]);
        case MarginFamily::gamma:
            if (x <= 0.0) return 1.0;
            return boost::math::gamma_q(p[0], p[1] * x);
        case MarginFamily::gev: {
            double z = (x - p[0]) / p[1];
            double shape = p[2];
            if (std::fabs(shape) < 1e-8)
                return -std::expm1(-std::exp(-z));
            double t = 1.0 + shape * z;
            if (t <= 0.0) return shape > 0.0 ? 1.0 : 0.0;
            return -std::expm1(-std::pow(t, -1.0 / shape));
        }
        case MarginFamily::normal_mixture: {
            int S = m.mixture_size();
            double s = 0.0;
            for (int c = 0; c < S; ++c)
                s += p[2 * S + c] * norm_cdf(-(x - p[c]) / p[S + c]);
            return s;
        }
        default:
            return 1.0 - margin_cdf(m, x);
    }
}

// precompute the quadrature normalization for the density-integral cdfs
inline void finalize_margin(MarginalModel& m) {
    if (m.family == MarginFamily::skew_normal)
        m.norm_const = margin_detail::skew_normal_std_cdf(9.5, m.params[2]);
    else if (m.family == MarginFamily::skew_student_t)
        m.norm_const = margin_detail::skew_t_std_cdf(
            std::numeric_limits<double>::infinity(), m.params[2], m.params[3]);
    else
        m.norm_const = 1.0;
}

struct QuantileFlag {
    double value = 0.0;
    bool clamped = false;
};

inline QuantileFlag margin_quantile_flagged(const MarginalModel& m, double p) {
    m.validate();
    QuantileFlag out;
    if (p <= 0.0 || p >= 1.0) {
        out.clamped = true;
        p = clamp_unit(p);
    }
    const auto& a = m.params;
    switch (m.family) {
        case MarginFamily::normal:
            out.value = a[0] + a[1] * norm_quantile(p);
            return out;
        case MarginFamily::log_normal:
            out.value = std::exp(a[0] + a[1] * norm_quantile(p));
            return out;
        case MarginFamily::gamma:
            out.value = gamma_p_inv(a[0], p) / a[1];
            return out;
        case MarginFamily::gev: {
            double shape = a[2];
            if (std::fabs(shape) < 1e-8)
                out.value = a[0] - a[1] * std::log(-std::log(p));
            else
                out.value = a[0] + a[1] * (std::pow(-std::log(p), -shape) - 1.0) / shape;
            return out;
        }
        default: break;
    }
    // bisection on the cdf for mixture and skew families
    double lo, hi;
    if (m.family == MarginFamily::normal_mixture) {
        int S = m.mixture_size();
        lo = a[0];
        hi = a[0];
        for (int s = 0; s < S; ++s) {
            lo = std::min(lo, a[s] - 10.0 * a[S + s]);
            hi = std::max(hi, a[s] + 10.0 * a[S + s]);
        }
    } else {
        double omega = a[1];
        lo = a[0] - 60.0 * omega;
        hi = a[0] + 60.0 * omega;
    }
    while (margin_cdf(m, lo) > p) lo -= (hi - lo);
    while (margin_cdf(m, hi) < p) hi += (hi - lo);
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (margin_cdf(m, mid) < p) lo = mid;
        else hi = mid;
        if (hi - lo < 1e-13 * (1.0 + std::fabs(mid))) break;
    }
    out.value = 0.5 * (lo + hi);
    return out;
}

inline double margin_quantile(const MarginalModel& m, double p) {
    return margin_quantile_flagged(m, p).value;
}

inline double margin_loglik(const MarginalModel& m, std::span<const double> x) {
    double ll = 0.0;
    for (double v : x) {
        double d = margin_pdf(m, v);
        if (!(d > 0.0)) return -std::numeric_limits<double>::infinity();
        ll += std::log(d);
    }
    return ll;
}

// inverse-transform sampling; deterministic per seed
inline std::vector<double> margin_sample(const MarginalModel& m, std::size_t n,
                                         std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = margin_quantile(m, rng.uniform());
    return out;
}

// ------------------------------------------------------------------ fitting

inline MarginalModel fit_parametric(std::span<const double> data, MarginFamily family) {
    const std::size_t n = data.size();
    if (n < 20)
        throw std::invalid_argument("fit_parametric: need at least 20 observations");
    if (family == MarginFamily::normal_mixture)
        throw std::invalid_argument("fit_parametric: use fit_mixture_normal for mixtures");

    const double m = mean(data);
    const double sd = sample_sd(data);
    if (!(sd > 0.0)) throw std::domain_error("fit_parametric: zero-variance data");

    MarginalModel out;
    out.family = family;

    switch (family) {
        case MarginFamily::normal: {
            double ss = 0.0;
            for (double v : data) ss += (v - m) * (v - m);
            out.params = {m, std::sqrt(ss / n)};
            break;
        }
        case MarginFamily::log_normal: {
            std::vector<double> lx(n);
            for (std::size_t i = 0; i < n; ++i) {
                if (data[i] <= 0.0)
                    throw std::domain_error("lognormal: data must be positive");
                lx[i] = std::log(data[i]);
            }
            double lm = mean(lx);
            double ss = 0.0;
            for (double v : lx) ss += (v - lm) * (v - lm);
            out.params = {lm, std::sqrt(ss / n)};
            break;
        }
        case MarginFamily::gamma: {
            double lsum = 0.0;
            for (double v : data) {
                if (v <= 0.0) throw std::domain_error("gamma: data must be positive");
                lsum += std::log(v);
            }
            double s = std::log(m) - lsum / n;
            double shape = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) /
                           (12.0 * s);
            for (int it = 0; it < 50; ++it) {
                double g = std::log(shape) - digamma(shape) - s;
                double gp = 1.0 / shape - trigamma(shape);
                double step = g / gp;
                shape -= step;
                if (!(shape > 1e-8)) shape = 1e-8;
                if (std::fabs(step) < 1e-12 * shape) break;
            }
            out.params = {shape, shape / m};
            break;
        }
        case MarginFamily::skew_normal:
        case MarginFamily::skew_student_t: {
            // moment-based start for the slant
            double sk = 0.0;
            for (double v : data) sk += std::pow((v - m) / sd, 3);
            sk /= n;
            double b = std::pow(std::fabs(sk), 2.0 / 3.0);
            double c = std::pow((4.0 - 3.14159265) / 2.0, 2.0 / 3.0);
            double delta = std::sqrt(1.5707963 * b / (b + c));
            delta = std::min(delta, 0.95) * (sk < 0 ? -1.0 : 1.0);
            double alpha0 = delta / std::sqrt(1.0 - delta * delta);
            double omega0 = sd / std::sqrt(std::max(0.1, 1.0 - 2.0 * delta * delta / 3.14159265));
            double xi0 = m - omega0 * delta * std::sqrt(2.0 / 3.14159265);

            bool skewt = family == MarginFamily::skew_student_t;
            std::vector<double> x0, lo, hi;
            if (skewt) {
                x0 = {xi0, omega0, alpha0, 10.0};
                lo = {m - 10.0 * sd, sd / 100.0, -40.0, 2.01};
                hi = {m + 10.0 * sd, sd * 20.0, 40.0, 100.0};
            } else {
                x0 = {xi0, omega0, alpha0};
                lo = {m - 10.0 * sd, sd / 100.0, -40.0};
                hi = {m + 10.0 * sd, sd * 20.0, 40.0};
            }
            auto neg_ll = [&](const std::vector<double>& p) {
                double ll = 0.0;
                for (double v : data) {
                    double d = skewt ? margin_detail::skew_t_pdf(v, p[0], p[1], p[2], p[3])
                                     : margin_detail::skew_normal_pdf(v, p[0], p[1], p[2]);
                    if (!(d > 0.0)) return 1e30;
                    ll += std::log(d);
                }
                return -ll;
            };
            auto res = nelder_mead(neg_ll, x0, lo, hi, 1e-7, skewt ? 800 : 500);
            out.params = res.x;
            if (!res.converged && res.fx >= 1e30)
                throw std::runtime_error("fit_parametric: skew fit failed to converge");
            break;
        }
        case MarginFamily::gev: {
            double sigma0 = sd * 0.7796968;
            double mu0 = m - 0.5772157 * sigma0;
            auto neg_ll = [&](const std::vector<double>& p) {
                double ll = 0.0;
                for (double v : data) {
                    double d = margin_detail::gev_pdf_std((v - p[0]) / p[1], p[2]) / p[1];
                    if (!(d > 0.0)) return 1e30;
                    ll += std::log(d);
                }
                return -ll;
            };
            auto res = nelder_mead(neg_ll, {mu0, sigma0, 0.1},
                                   {m - 10.0 * sd, sd / 100.0, -1.0},
                                   {m + 10.0 * sd, sd * 10.0, 2.0}, 1e-7, 500);
            out.params = res.x;
            break;
        }
        case MarginFamily::normal_mixture:
            break; // unreachable
    }
    finalize_margin(out);
    out.loglik = margin_loglik(out, data);
    if (!std::isfinite(out.loglik))
        throw std::runtime_error("fit_parametric: non-finite likelihood at optimum");
    return out;
}

} // namespace tailvine
