#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tailvine/bicop/families.hpp"
#include "tailvine/math/optimize.hpp"
#include "tailvine/math/rng.hpp"
#include "tailvine/math/special.hpp"

namespace tailvine {

enum class Family {
    independence,
    gaussian,
    student_t,
    clayton,
    gumbel,
    frank,
    joe,
    bb1,
    bb8,
};

inline const char* family_name(Family f) {
    switch (f) {
        case Family::independence: return "indep";
        case Family::gaussian: return "gaussian";
        case Family::student_t: return "t";
        case Family::clayton: return "clayton";
        case Family::gumbel: return "gumbel";
        case Family::frank: return "frank";
        case Family::joe: return "joe";
        case Family::bb1: return "bb1";
        case Family::bb8: return "bb8";
    }
    return "?";
}

inline Family family_from_name(const std::string& s) {
    if (s == "indep" || s == "independence") return Family::independence;
    if (s == "gaussian" || s == "normal") return Family::gaussian;
    if (s == "t" || s == "student" || s == "student_t") return Family::student_t;
    if (s == "clayton") return Family::clayton;
    if (s == "gumbel") return Family::gumbel;
    if (s == "frank") return Family::frank;
    if (s == "joe") return Family::joe;
    if (s == "bb1") return Family::bb1;
    if (s == "bb8") return Family::bb8;
    throw std::invalid_argument("unknown copula family: " + s);
}

inline int family_param_count(Family f) {
    switch (f) {
        case Family::independence: return 0;
        case Family::gaussian: return 1;
        case Family::student_t: return 2; // rho + df
        case Family::clayton:
        case Family::gumbel:
        case Family::frank:
        case Family::joe: return 1;
        case Family::bb1:
        case Family::bb8: return 2;
    }
    return 0;
}

inline bool family_rotatable(Family f) {
    switch (f) {
        case Family::clayton:
        case Family::gumbel:
        case Family::joe:
        case Family::bb1:
        case Family::bb8: return true;
        default: return false;
    }
}

struct BivariateCopula {
    Family family = Family::independence;
    int rotation = 0; // 0, 90, 180, 270
    std::vector<double> params;
    std::optional<double> df; // student t only

    void validate() const {
        if (rotation != 0 && rotation != 90 && rotation != 180 && rotation != 270)
            throw std::domain_error("rotation must be one of {0, 90, 180, 270}");
        if (rotation != 0 && !family_rotatable(family))
            throw std::domain_error(std::string(family_name(family)) +
                                    ": rotation must be 0");
        auto need = [&](std::size_t k) {
            if (params.size() != k)
                throw std::domain_error(std::string(family_name(family)) +
                                        ": expected " + std::to_string(k) +
                                        " parameter(s)");
        };
        switch (family) {
            case Family::independence:
                need(0);
                break;
            case Family::gaussian:
                need(1);
                if (!(params[0] > -1.0 && params[0] < 1.0))
                    throw std::domain_error("gaussian: rho must lie in (-1,1)");
                break;
            case Family::student_t:
                need(1);
                if (!(params[0] > -1.0 && params[0] < 1.0))
                    throw std::domain_error("t: rho must lie in (-1,1)");
                if (!df || !(*df >= 2.0 && *df <= 30.0))
                    throw std::domain_error("t: df must lie in [2,30]");
                break;
            case Family::clayton:
                need(1);
                if (!(params[0] > 0.0))
                    throw std::domain_error("clayton: theta must be > 0");
                break;
            case Family::gumbel:
                need(1);
                if (!(params[0] >= 1.0))
                    throw std::domain_error("gumbel: theta must be >= 1");
                break;
            case Family::frank:
                need(1);
                if (params[0] == 0.0)
                    throw std::domain_error("frank: theta must be nonzero");
                break;
            case Family::joe:
                need(1);
                if (!(params[0] >= 1.0))
                    throw std::domain_error("joe: theta must be >= 1");
                break;
            case Family::bb1:
                need(2);
                if (!(params[0] > 0.0))
                    throw std::domain_error("bb1: theta must be > 0");
                if (!(params[1] >= 1.0))
                    throw std::domain_error("bb1: delta must be >= 1");
                break;
            case Family::bb8:
                need(2);
                if (!(params[0] >= 1.0))
                    throw std::domain_error("bb8: theta must be >= 1");
                if (!(params[1] > 0.0 && params[1] <= 1.0))
                    throw std::domain_error("bb8: delta must lie in (0,1]");
                break;
        }
    }

    int n_params() const { return family_param_count(family); }
};

enum class HSide {
    first_given_second, // h(u|v) = P(U1 <= u | U2 = v)
    second_given_first, // h(u|v) = P(U2 <= u | U1 = v)
};

namespace bicop_detail {

inline double kernel_cdf(const BivariateCopula& c, double u, double v) {
    switch (c.family) {
        case Family::independence: return u * v;
        case Family::gaussian: return gauss_cdf(u, v, c.params[0]);
        case Family::student_t: return t_cdf2(u, v, c.params[0], *c.df);
        case Family::clayton: return clayton_cdf(u, v, c.params[0]);
        case Family::gumbel: return gumbel_cdf(u, v, c.params[0]);
        case Family::frank: return frank_cdf(u, v, c.params[0]);
        case Family::joe: return joe_cdf(u, v, c.params[0]);
        case Family::bb1: return bb1_cdf(u, v, c.params[0], c.params[1]);
        case Family::bb8: return bb8_cdf(u, v, c.params[0], c.params[1]);
    }
    return u * v;
}

inline double kernel_log_pdf(const BivariateCopula& c, double u, double v) {
    switch (c.family) {
        case Family::independence: return 0.0;
        case Family::gaussian: return gauss_log_pdf(u, v, c.params[0]);
        case Family::student_t: return t_log_pdf(u, v, c.params[0], *c.df);
        case Family::clayton: return clayton_log_pdf(u, v, c.params[0]);
        case Family::gumbel: return gumbel_log_pdf(u, v, c.params[0]);
        case Family::frank: return frank_log_pdf(u, v, c.params[0]);
        case Family::joe: return joe_log_pdf(u, v, c.params[0]);
        case Family::bb1: return bb1_log_pdf(u, v, c.params[0], c.params[1]);
        case Family::bb8: return bb8_log_pdf(u, v, c.params[0], c.params[1]);
    }
    return 0.0;
}

// h(u|v) of the unrotated kernel; exchangeable, so both directions agree
inline double kernel_h(const BivariateCopula& c, double u, double v) {
    switch (c.family) {
        case Family::independence: return u;
        case Family::gaussian: return gauss_h(u, v, c.params[0]);
        case Family::student_t: return t_h(u, v, c.params[0], *c.df);
        case Family::clayton: return clayton_h(u, v, c.params[0]);
        case Family::gumbel: return gumbel_h(u, v, c.params[0]);
        case Family::frank: return frank_h(u, v, c.params[0]);
        case Family::joe: return joe_h(u, v, c.params[0]);
        case Family::bb1: return bb1_h(u, v, c.params[0], c.params[1]);
        case Family::bb8: return bb8_h(u, v, c.params[0], c.params[1]);
    }
    return u;
}

inline double kernel_hinv(const BivariateCopula& c, double w, double v) {
    switch (c.family) {
        case Family::independence: return w;
        case Family::gaussian: return gauss_hinv(w, v, c.params[0]);
        case Family::student_t: return t_hinv(w, v, c.params[0], *c.df);
        case Family::clayton: return clayton_hinv(w, v, c.params[0]);
        case Family::frank: return frank_hinv(w, v, c.params[0]);
        case Family::gumbel:
        case Family::joe:
        case Family::bb1:
        case Family::bb8: {
            // monotone bisection in the conditioned argument
            auto f = [&](double u) { return kernel_h(c, u, v); };
            double lo = 1e-14, hi = 1.0 - 1e-14;
            if (f(lo) >= w) return lo;
            if (f(hi) <= w) return hi;
            for (int i = 0; i < 100; ++i) {
                double mid = 0.5 * (lo + hi);
                if (kernel_h(c, mid, v) < w) lo = mid;
                else hi = mid;
                if (hi - lo < 1e-15) break;
            }
            return 0.5 * (lo + hi);
        }
    }
    return w;
}

// survival form 1 - kernel_h(1-s, v), tail-accurate for small s
inline double kernel_hbar(const BivariateCopula& c, double s, double v) {
    if (s <= 0.0) return 0.0;
    if (s >= 0.5) return 1.0 - kernel_h(c, 1.0 - s, v);
    switch (c.family) {
        case Family::independence: return s;
        case Family::gaussian: return gauss_hbar(s, v, c.params[0]);
        case Family::student_t: return t_hbar(s, v, c.params[0], *c.df);
        case Family::clayton: return clayton_hbar(s, v, c.params[0]);
        case Family::gumbel: return gumbel_hbar(s, v, c.params[0]);
        case Family::frank: return frank_hbar(s, v, c.params[0]);
        case Family::joe: return joe_hbar(s, v, c.params[0]);
        case Family::bb1: return bb1_hbar(s, v, c.params[0], c.params[1]);
        case Family::bb8: return bb8_hbar(s, v, c.params[0], c.params[1]);
    }
    return s;
}

} // namespace bicop_detail

// P(conditioned > 1 - s | conditioning = v): the upper-tail complement of
// hfunc, kept accurate below the clamping floor so that tiny exceedance
// probabilities remain evaluable
inline double hfunc_survival(const BivariateCopula& c, HSide side, double s,
                             double v) {
    c.validate();
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    v = clamp_unit(v);
    using namespace bicop_detail;
    if (side == HSide::first_given_second) {
        switch (c.rotation) {
            case 90: return kernel_h(c, s, v);
            case 180: return kernel_h(c, s, 1.0 - v);
            case 270: return kernel_hbar(c, s, 1.0 - v);
            default: return kernel_hbar(c, s, v);
        }
    }
    switch (c.rotation) {
        case 90: return kernel_hbar(c, s, 1.0 - v);
        case 180: return kernel_h(c, s, 1.0 - v);
        case 270: return kernel_h(c, s, v);
        default: return kernel_hbar(c, s, v);
    }
}

inline double copula_cdf(const BivariateCopula& c, double u, double v) {
    c.validate();
    u = clamp_unit(u);
    v = clamp_unit(v);
    using namespace bicop_detail;
    switch (c.rotation) {
        case 0: return kernel_cdf(c, u, v);
        case 90: return v - kernel_cdf(c, 1.0 - u, v);
        case 180: return u + v - 1.0 + kernel_cdf(c, 1.0 - u, 1.0 - v);
        case 270: return u - kernel_cdf(c, u, 1.0 - v);
    }
    return u * v;
}

inline double copula_log_density(const BivariateCopula& c, double u, double v) {
    c.validate();
    u = clamp_unit(u);
    v = clamp_unit(v);
    using namespace bicop_detail;
    switch (c.rotation) {
        case 0: return kernel_log_pdf(c, u, v);
        case 90: return kernel_log_pdf(c, 1.0 - u, v);
        case 180: return kernel_log_pdf(c, 1.0 - u, 1.0 - v);
        case 270: return kernel_log_pdf(c, u, 1.0 - v);
    }
    return 0.0;
}

inline double copula_density(const BivariateCopula& c, double u, double v) {
    return std::exp(copula_log_density(c, u, v));
}

// h-function: hfunc(c, side, u, v) = P(conditioned <= u | conditioning = v).
// PIT arguments clamp at the 1e-10 floor; the returned probability level is
// only confined to the representable open interval so that h/hinv round
// trips survive in strongly dependent corners.
inline double hfunc(const BivariateCopula& c, HSide side, double u, double v) {
    c.validate();
    u = clamp_unit(u);
    v = clamp_unit(v);
    using namespace bicop_detail;
    double r;
    if (side == HSide::first_given_second) {
        switch (c.rotation) {
            case 90: r = 1.0 - kernel_h(c, 1.0 - u, v); break;
            case 180: r = 1.0 - kernel_h(c, 1.0 - u, 1.0 - v); break;
            case 270: r = kernel_h(c, u, 1.0 - v); break;
            default: r = kernel_h(c, u, v); break;
        }
    } else {
        switch (c.rotation) {
            case 90: r = kernel_h(c, u, 1.0 - v); break;
            case 180: r = 1.0 - kernel_h(c, 1.0 - u, 1.0 - v); break;
            case 270: r = 1.0 - kernel_h(c, 1.0 - u, v); break;
            default: r = kernel_h(c, u, v); break;
        }
    }
    return std::min(std::max(r, 1e-300), 1.0 - 1e-16);
}

inline double hinv(const BivariateCopula& c, HSide side, double w, double v) {
    c.validate();
    w = std::min(std::max(w, 1e-300), 1.0 - 1e-16);
    v = clamp_unit(v);
    using namespace bicop_detail;
    double r;
    if (side == HSide::first_given_second) {
        switch (c.rotation) {
            case 90: r = 1.0 - kernel_hinv(c, 1.0 - w, v); break;
            case 180: r = 1.0 - kernel_hinv(c, 1.0 - w, 1.0 - v); break;
            case 270: r = kernel_hinv(c, w, 1.0 - v); break;
            default: r = kernel_hinv(c, w, v); break;
        }
    } else {
        switch (c.rotation) {
            case 90: r = kernel_hinv(c, w, 1.0 - v); break;
            case 180: r = 1.0 - kernel_hinv(c, 1.0 - w, 1.0 - v); break;
            case 270: r = 1.0 - kernel_hinv(c, 1.0 - w, v); break;
            default: r = kernel_hinv(c, w, v); break;
        }
    }
    return std::min(std::max(r, 1e-300), 1.0 - 1e-16);
}

inline double param_to_tau(const BivariateCopula& c) {
    c.validate();
    double tau;
    switch (c.family) {
        case Family::independence: tau = 0.0; break;
        case Family::gaussian:
        case Family::student_t:
            tau = 2.0 * std::asin(c.params[0]) / 3.14159265358979323846;
            break;
        case Family::clayton: tau = c.params[0] / (c.params[0] + 2.0); break;
        case Family::gumbel: tau = 1.0 - 1.0 / c.params[0]; break;
        case Family::frank: {
            double th = std::fabs(c.params[0]);
            tau = 1.0 - 4.0 / th * (1.0 - debye1(th));
            if (c.params[0] < 0.0) tau = -tau;
            break;
        }
        case Family::joe: tau = bicop_detail::joe_tau(c.params[0]); break;
        case Family::bb1:
            tau = 1.0 - 2.0 / (c.params[1] * (c.params[0] + 2.0));
            break;
        case Family::bb8: tau = bicop_detail::bb8_tau(c.params[0], c.params[1]); break;
    }
    if (c.rotation == 90 || c.rotation == 270) tau = -tau;
    return tau;
}

// Start parameters from an empirical tau. One-parameter families invert the
// tau relation exactly; two-parameter families use tau to seed the first
// parameter only.
inline BivariateCopula tau_to_param(Family f, int rotation, double tau) {
    BivariateCopula c;
    c.family = f;
    c.rotation = rotation;
    double t = tau;
    if (rotation == 90 || rotation == 270) t = -tau;
    if (f != Family::independence && !(tau > -1.0 && tau < 1.0))
        throw std::domain_error("tau must lie in (-1,1)");

    auto require_positive = [&](const char* fam) {
        if (!(t > 0.0))
            throw std::domain_error(std::string(fam) +
                                    ": tau not attainable for this rotation");
    };

    switch (f) {
        case Family::independence:
            if (std::fabs(tau) > 1e-8)
                throw std::domain_error("independence: tau must be 0");
            break;
        case Family::gaussian:
            c.params = {std::sin(1.5707963267948966 * tau)};
            break;
        case Family::student_t:
            c.params = {std::sin(1.5707963267948966 * tau)};
            c.df = 8.0;
            break;
        case Family::clayton:
            require_positive("clayton");
            c.params = {std::min(28.0, 2.0 * t / (1.0 - t))};
            break;
        case Family::gumbel:
            require_positive("gumbel");
            c.params = {std::min(20.0, 1.0 / (1.0 - t))};
            break;
        case Family::frank: {
            if (std::fabs(t) < 1e-10)
                throw std::domain_error("frank: tau must be nonzero");
            double at = std::fabs(t);
            BivariateCopula probe{Family::frank, 0, {1.0}, std::nullopt};
            double theta = bisect_root(
                [&](double th) {
                    probe.params[0] = th;
                    return param_to_tau(probe);
                },
                1e-8, 100.0, std::min(at, 0.98), 1e-11);
            c.params = {t > 0.0 ? theta : -theta};
            break;
        }
        case Family::joe: {
            require_positive("joe");
            double theta = bisect_root([](double th) { return bicop_detail::joe_tau(th); },
                                       1.0, 50.0, std::min(t, 0.95), 1e-11);
            c.params = {theta};
            break;
        }
        case Family::bb1: {
            require_positive("bb1");
            double delta = 1.5;
            double theta = std::max(0.05, 2.0 / (delta * (1.0 - t)) - 2.0);
            c.params = {std::min(theta, 7.0), delta};
            break;
        }
        case Family::bb8: {
            require_positive("bb8");
            double delta = 0.9;
            double lo = 1.0, hi = 8.0;
            double target = std::min(t, bicop_detail::bb8_tau(hi, delta) - 1e-6);
            double theta = target <= 0.0
                               ? 1.5
                               : bisect_root([&](double th) {
                                     return bicop_detail::bb8_tau(th, delta);
                                 }, lo, hi, target, 1e-9);
            c.params = {theta, delta};
            break;
        }
    }
    c.validate();
    return c;
}

struct BicopSample {
    std::vector<double> u;
    std::vector<double> v;
};

// deterministic per seed; second coordinate drawn through the inverse
// h-function so the pair carries the copula's dependence
inline BicopSample simulate_bicop(const BivariateCopula& c, std::size_t n,
                                  std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("simulate_bicop: n must be >= 1");
    c.validate();
    Rng rng(seed);
    BicopSample out;
    out.u.resize(n);
    out.v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double a = rng.uniform();
        double w = rng.uniform();
        out.u[i] = a;
        out.v[i] = hinv(c, HSide::second_given_first, w, a);
    }
    return out;
}

} // namespace tailvine
