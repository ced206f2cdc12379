#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "tailvine/bicop/bicop.hpp"
#include "tailvine/math/optimize.hpp"
#include "tailvine/math/stats.hpp"

namespace tailvine {

struct CatalogEntry {
    Family family = Family::independence;
    int rotation = 0;
};

// Fit catalog: the nine families with the rotations that extend them to
// negative dependence. Order matters; AIC ties go to the earlier entry.
inline std::vector<CatalogEntry> default_catalog() {
    std::vector<CatalogEntry> cat;
    cat.push_back({Family::independence, 0});
    cat.push_back({Family::gaussian, 0});
    cat.push_back({Family::student_t, 0});
    for (Family f : {Family::clayton, Family::gumbel, Family::joe, Family::bb1,
                     Family::bb8})
        for (int rot : {0, 90, 180, 270}) cat.push_back({f, rot});
    cat.push_back({Family::frank, 0});
    return cat;
}

inline std::vector<CatalogEntry> gaussian_catalog() {
    return {{Family::independence, 0}, {Family::gaussian, 0}};
}

struct BicopFit {
    BivariateCopula copula;
    double loglik = 0.0;
    double aic = 0.0;
    bool converged = true;
    bool tau_fallback = false; // optimizer failed; tau-inversion estimate used
};

namespace bicop_detail {

constexpr double kRhoMax = 0.9999;

struct FitBox {
    double lo1, hi1;
    double lo2 = 0.0, hi2 = 0.0;
};

inline FitBox fit_box(Family f, bool positive_tau) {
    switch (f) {
        case Family::gaussian:
        case Family::student_t: return {-kRhoMax, kRhoMax, 2.0, 30.0};
        case Family::clayton: return {1e-4, 28.0};
        case Family::gumbel: return {1.0, 20.0};
        case Family::frank:
            return positive_tau ? FitBox{1e-3, 40.0} : FitBox{-40.0, -1e-3};
        case Family::joe: return {1.0, 20.0};
        case Family::bb1: return {1e-3, 7.0, 1.0, 7.0};
        case Family::bb8: return {1.0, 8.0, 1e-3, 1.0};
        default: return {0.0, 0.0};
    }
}

inline double loglik_sum(const BivariateCopula& c, std::span<const double> u,
                         std::span<const double> v) {
    double ll = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double l = copula_log_density(c, u[i], v[i]);
        if (!std::isfinite(l)) return -std::numeric_limits<double>::infinity();
        ll += l;
    }
    return ll;
}

// gaussian profile likelihood reduces to three cross moments of the normal
// scores, making the rho search O(1) per evaluation
inline BicopFit fit_gaussian(std::span<const double> u, std::span<const double> v) {
    const std::size_t n = u.size();
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = norm_quantile(clamp_unit(u[i]));
        double y = norm_quantile(clamp_unit(v[i]));
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    auto neg_ll = [&](double rho) {
        double r2 = 1.0 - rho * rho;
        return 0.5 * n * std::log(r2) +
               (rho * rho * (sxx + syy) - 2.0 * rho * sxy) / (2.0 * r2);
    };
    auto res = brent_minimize(neg_ll, -kRhoMax, kRhoMax, 1e-8, 200);
    BivariateCopula c{Family::gaussian, 0, {res.x}, std::nullopt};
    return {c, -res.fx, 0.0, res.converged, false};
}

// Profile search: scan df with rho pinned at its tau-inversion value (the
// rho estimate is nearly df-free), then optimize rho at the winning df and
// refine df once more.
inline BicopFit fit_student(std::span<const double> u, std::span<const double> v,
                            double tau_hat) {
    const std::size_t n = u.size();
    static const double df_grid[] = {2.0, 2.8, 4.0, 5.6, 8.0, 12.0, 18.0, 27.0, 30.0};
    std::vector<double> x(n), y(n), lx(n);
    double cgam = 0.0, cur_df = 0.0;

    auto load_df = [&](double nu) {
        cur_df = nu;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = t_quantile(clamp_unit(u[i]), nu);
            y[i] = t_quantile(clamp_unit(v[i]), nu);
            lx[i] = std::log1p(x[i] * x[i] / nu) + std::log1p(y[i] * y[i] / nu);
        }
        cgam = std::lgamma(0.5 * (nu + 2.0)) + std::lgamma(0.5 * nu) -
               2.0 * std::lgamma(0.5 * (nu + 1.0));
    };
    auto ll_rho = [&](double rho) {
        double r2 = 1.0 - rho * rho;
        double nu = cur_df;
        double ll = n * (cgam - 0.5 * std::log(r2));
        for (std::size_t i = 0; i < n; ++i) {
            double quad = (x[i] * x[i] - 2.0 * rho * x[i] * y[i] + y[i] * y[i]) /
                          (nu * r2);
            ll += -0.5 * (nu + 2.0) * std::log1p(quad) + 0.5 * (nu + 1.0) * lx[i];
        }
        return ll;
    };

    // coarse df ranking on a subsample with rho pinned; the expensive
    // t-quantile transforms run on the full data only for the short list
    const double rho_pin =
        std::clamp(std::sin(1.5707963267948966 * tau_hat), -kRhoMax, kRhoMax);
    const std::size_t stride = std::max<std::size_t>(1, n / 500);
    std::size_t best_idx = 0;
    {
        double best_pin = -std::numeric_limits<double>::infinity();
        double r2 = 1.0 - rho_pin * rho_pin;
        for (std::size_t k = 0; k < std::size(df_grid); ++k) {
            double nu = df_grid[k];
            double cg = std::lgamma(0.5 * (nu + 2.0)) + std::lgamma(0.5 * nu) -
                        2.0 * std::lgamma(0.5 * (nu + 1.0));
            double ll = 0.0;
            std::size_t cnt = 0;
            for (std::size_t i = 0; i < n; i += stride, ++cnt) {
                double xi = t_quantile(clamp_unit(u[i]), nu);
                double yi = t_quantile(clamp_unit(v[i]), nu);
                double quad =
                    (xi * xi - 2.0 * rho_pin * xi * yi + yi * yi) / (nu * r2);
                ll += -0.5 * (nu + 2.0) * std::log1p(quad) +
                      0.5 * (nu + 1.0) *
                          (std::log1p(xi * xi / nu) + std::log1p(yi * yi / nu));
            }
            ll += cnt * (cg - 0.5 * std::log(r2));
            if (ll > best_pin) {
                best_pin = ll;
                best_idx = k;
            }
        }
    }

    bool conv = true;
    auto optimize_at = [&](double nu, double& rho_out) {
        load_df(nu);
        auto res = brent_minimize([&](double r) { return -ll_rho(r); }, -kRhoMax,
                                  kRhoMax, 1e-6, 200);
        conv = conv && res.converged;
        rho_out = res.x;
        return -res.fx;
    };

    double best_df = df_grid[best_idx];
    double best_rho;
    double best_ll = optimize_at(best_df, best_rho);
    for (std::size_t k : {best_idx > 0 ? best_idx - 1 : best_idx,
                          std::min(best_idx + 1, std::size(df_grid) - 1)}) {
        if (df_grid[k] == best_df) continue;
        double r;
        double ll = optimize_at(df_grid[k], r);
        if (ll > best_ll) {
            best_ll = ll;
            best_rho = r;
            best_df = df_grid[k];
        }
    }
    BivariateCopula c{Family::student_t, 0, {best_rho}, best_df};
    return {c, best_ll, 0.0, conv, false};
}

inline BicopFit fit_one_param(Family fam, int rotation, double tau_hat,
                              std::span<const double> u, std::span<const double> v) {
    bool pos = !(rotation == 90 || rotation == 270);
    FitBox box = fit_box(fam, tau_hat > 0.0);
    BivariateCopula c{fam, rotation, {0.0}, std::nullopt};

    // reflection families cannot reach the empirical dependence sign under
    // this rotation; report the near-independence boundary instead
    bool sign_ok = fam == Family::frank || (pos ? tau_hat > 0.0 : tau_hat < 0.0);
    if (!sign_ok) {
        c.params[0] = fam == Family::clayton ? box.lo1 : box.lo1 == 1.0 ? 1.0 + 1e-8 : box.lo1;
        double ll = loglik_sum(c, u, v);
        return {c, ll, 0.0, true, false};
    }

    auto neg_ll = [&](double th) {
        BivariateCopula cc{fam, rotation, {th}, std::nullopt};
        return -loglik_sum(cc, u, v);
    };
    auto res = brent_minimize(neg_ll, box.lo1, box.hi1, 1e-6, 200);
    if (!res.converged) {
        try {
            BivariateCopula fb = tau_to_param(fam, rotation, tau_hat);
            return {fb, loglik_sum(fb, u, v), 0.0, false, true};
        } catch (const std::domain_error&) {
            // keep the best point the search reached
        }
    }
    c.params[0] = res.x;
    return {c, -res.fx, 0.0, res.converged, false};
}

inline BicopFit fit_two_param(Family fam, int rotation, double tau_hat,
                              std::span<const double> u, std::span<const double> v) {
    bool pos = !(rotation == 90 || rotation == 270);
    FitBox box = fit_box(fam, true);
    bool sign_ok = pos ? tau_hat > 0.0 : tau_hat < 0.0;
    if (!sign_ok) {
        BivariateCopula c{fam, rotation,
                          fam == Family::bb1 ? std::vector<double>{box.lo1, 1.0}
                                             : std::vector<double>{1.0 + 1e-8, 0.5},
                          std::nullopt};
        return {c, loglik_sum(c, u, v), 0.0, true, false};
    }

    BivariateCopula start = tau_to_param(fam, rotation, tau_hat);
    auto neg_ll = [&](const std::vector<double>& p) {
        BivariateCopula cc{fam, rotation, p, std::nullopt};
        double th = p[0], de = p[1];
        if (fam == Family::bb1 && !(th > 0.0 && de >= 1.0)) return 1e30;
        if (fam == Family::bb8 && !(th >= 1.0 && de > 0.0 && de <= 1.0)) return 1e30;
        double ll = loglik_sum(cc, u, v);
        return std::isfinite(ll) ? -ll : 1e30;
    };
    auto res = nelder_mead(neg_ll, start.params, {box.lo1, box.lo2},
                           {box.hi1, box.hi2}, 1e-6, 200);
    if (!res.converged && -res.fx < loglik_sum(start, u, v))
        return {start, loglik_sum(start, u, v), 0.0, false, true};
    BivariateCopula c{fam, rotation, res.x, std::nullopt};
    return {c, -res.fx, 0.0, res.converged, false};
}

} // namespace bicop_detail

// Per-pair ML fit with family selection by AIC. The independence decision is
// the asymptotic two-sided tau test at the 5% level.
inline BicopFit fit_bicop(std::span<const double> u, std::span<const double> v,
                          const std::vector<CatalogEntry>& allowed = default_catalog()) {
    if (allowed.empty())
        throw std::invalid_argument("fit_bicop: allowed family set is empty");
    if (u.size() != v.size() || u.size() < 10)
        throw std::invalid_argument("fit_bicop: need paired observations, n >= 10");

    const double tau_hat = kendall_tau(u, v);
    bool indep_allowed = false;
    for (const auto& e : allowed)
        if (e.family == Family::independence) indep_allowed = true;

    if (indep_allowed && kendall_tau_z(tau_hat, u.size()) < 1.959963984540054) {
        BicopFit f;
        f.copula = BivariateCopula{Family::independence, 0, {}, std::nullopt};
        f.loglik = 0.0;
        f.aic = 0.0;
        return f;
    }

    bool have_best = false;
    BicopFit best;
    for (const auto& entry : allowed) {
        if (entry.family == Family::independence) continue;
        BicopFit cand;
        switch (entry.family) {
            case Family::gaussian:
                cand = bicop_detail::fit_gaussian(u, v);
                break;
            case Family::student_t:
                cand = bicop_detail::fit_student(u, v, tau_hat);
                break;
            case Family::bb1:
            case Family::bb8:
                cand = bicop_detail::fit_two_param(entry.family, entry.rotation,
                                                   tau_hat, u, v);
                break;
            default:
                cand = bicop_detail::fit_one_param(entry.family, entry.rotation,
                                                   tau_hat, u, v);
                break;
        }
        cand.aic = -2.0 * cand.loglik + 2.0 * cand.copula.n_params();
        if (!std::isfinite(cand.loglik)) continue;
        if (!have_best || cand.aic < best.aic) {
            best = cand;
            have_best = true;
        }
    }
    if (!have_best) {
        if (indep_allowed) {
            BicopFit f;
            f.copula = BivariateCopula{Family::independence, 0, {}, std::nullopt};
            return f;
        }
        throw std::runtime_error("fit_bicop: no admissible candidate produced a fit");
    }
    return best;
}

} // namespace tailvine
