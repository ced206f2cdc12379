#pragma once

// Linear quantile regression benchmark: check-loss estimation via
// majorize-minimize with an epsilon schedule, a vertex polish, bootstrap
// standard errors, grid inversion by bisection, and crossing detection.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tailvine/math/parallel.hpp"
#include "tailvine/math/rng.hpp"
#include "tailvine/math/stats.hpp"

namespace tailvine {

inline double check_loss(double alpha, std::span<const double> residuals) {
    double s = 0.0;
    for (double r : residuals) s += r * (alpha - (r < 0.0 ? 1.0 : 0.0));
    return s;
}

struct QuantileRegressionFit {
    double alpha = 0.5;
    std::vector<double> beta;      // intercept first
    std::vector<double> std_error; // bootstrap; empty unless requested
    int iterations = 0;
    bool converged = false;
    double loss = 0.0;
};

namespace lqr_detail {

// solve (X'WX) b = X'Wy + (alpha-1/2) sum x via Cholesky; X has an implicit
// leading 1-column
inline std::vector<double> weighted_solve(const std::vector<double>& y,
                                          const std::vector<std::vector<double>>& xcols,
                                          const std::vector<double>& w, double alpha) {
    const std::size_t n = y.size();
    const std::size_t k = xcols.size() + 1;
    std::vector<double> xtx(k * k, 0.0), xty(k, 0.0);
    std::vector<double> row(k);
    for (std::size_t i = 0; i < n; ++i) {
        row[0] = 1.0;
        for (std::size_t j = 1; j < k; ++j) row[j] = xcols[j - 1][i];
        for (std::size_t a = 0; a < k; ++a) {
            xty[a] += w[i] * row[a] * y[i] + (alpha - 0.5) * row[a];
            for (std::size_t b = a; b < k; ++b) xtx[a * k + b] += w[i] * row[a] * row[b];
        }
    }
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < a; ++b) xtx[a * k + b] = xtx[b * k + a];

    // Cholesky with a collinearity check
    std::vector<double> L(k * k, 0.0);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b <= a; ++b) {
            double s = xtx[a * k + b];
            for (std::size_t c = 0; c < b; ++c) s -= L[a * k + c] * L[b * k + c];
            if (a == b) {
                if (s <= 1e-10 * (std::fabs(xtx[a * k + a]) + 1.0))
                    throw std::domain_error(
                        "fit_lqr: design is rank deficient at column " +
                        std::to_string(a == 0 ? 0 : a - 1));
                L[a * k + a] = std::sqrt(s);
            } else {
                L[a * k + b] = s / L[b * k + b];
            }
        }
    }
    std::vector<double> z(k), beta(k);
    for (std::size_t a = 0; a < k; ++a) {
        double s = xty[a];
        for (std::size_t c = 0; c < a; ++c) s -= L[a * k + c] * z[c];
        z[a] = s / L[a * k + a];
    }
    for (std::size_t a = k; a-- > 0;) {
        double s = z[a];
        for (std::size_t c = a + 1; c < k; ++c) s -= L[c * k + a] * beta[c];
        beta[a] = s / L[a * k + a];
    }
    return beta;
}

inline void residuals_of(const std::vector<double>& y,
                         const std::vector<std::vector<double>>& xcols,
                         const std::vector<double>& beta, std::vector<double>& r) {
    const std::size_t n = y.size();
    r.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double pred = beta[0];
        for (std::size_t j = 0; j < xcols.size(); ++j) pred += beta[j + 1] * xcols[j][i];
        r[i] = y[i] - pred;
    }
}

} // namespace lqr_detail

// Check-loss minimization by iteratively reweighted least squares with a
// shrinking smoothing floor, then an exact interpolation polish through the
// d+1 smallest residuals when that lowers the loss.
inline QuantileRegressionFit fit_lqr(const std::vector<double>& y,
                                     const std::vector<std::vector<double>>& xcols,
                                     double alpha, int bootstrap_se = 0,
                                     std::uint64_t seed = 1) {
    const std::size_t n = y.size();
    const std::size_t d = xcols.size();
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("fit_lqr: alpha must lie in (0,1)");
    if (n <= d + 1)
        throw std::invalid_argument("fit_lqr: need more observations than coefficients");
    for (const auto& c : xcols)
        if (c.size() != n) throw std::invalid_argument("fit_lqr: ragged design");

    QuantileRegressionFit fit;
    fit.alpha = alpha;

    // work on centered, unit-scale covariates; raw scales can differ by
    // orders of magnitude and wreck the weighted normal equations
    std::vector<double> shift(d), scale(d);
    std::vector<std::vector<double>> xs(d, std::vector<double>(n));
    for (std::size_t j = 0; j < d; ++j) {
        shift[j] = mean(xcols[j]);
        scale[j] = sample_sd(xcols[j]);
        if (!(scale[j] > 0.0))
            throw std::domain_error("fit_lqr: design is rank deficient at column " +
                                    std::to_string(j));
        for (std::size_t i = 0; i < n; ++i)
            xs[j][i] = (xcols[j][i] - shift[j]) / scale[j];
    }

    double yscale = sample_sd(y) + 1e-12;
    std::vector<double> w(n, 1.0), r;
    std::vector<double> beta = lqr_detail::weighted_solve(y, xs, w, 0.5);
    lqr_detail::residuals_of(y, xs, beta, r);

    int total_iters = 0;
    for (double eps = 1e-3 * yscale; eps >= 1e-12 * yscale; eps *= 0.05) {
        for (int it = 0; it < 60; ++it) {
            ++total_iters;
            for (std::size_t i = 0; i < n; ++i)
                w[i] = 0.5 / std::max(eps, std::fabs(r[i]));
            auto next = lqr_detail::weighted_solve(y, xs, w, alpha);
            double delta = 0.0;
            for (std::size_t j = 0; j < beta.size(); ++j)
                delta = std::max(delta, std::fabs(next[j] - beta[j]));
            beta = std::move(next);
            lqr_detail::residuals_of(y, xs, beta, r);
            if (delta < 1e-11 * yscale) break;
        }
    }
    double loss = check_loss(alpha, r);

    // polish: a check-loss optimum interpolates d+1 points
    {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::partial_sort(idx.begin(), idx.begin() + d + 1, idx.end(),
                          [&](std::size_t a, std::size_t b) {
                              return std::fabs(r[a]) < std::fabs(r[b]);
                          });
        std::vector<double> ys(d + 1);
        std::vector<std::vector<double>> xsub(d, std::vector<double>(d + 1));
        std::vector<double> ones(d + 1, 1.0);
        for (std::size_t i = 0; i <= d; ++i) {
            ys[i] = y[idx[i]];
            for (std::size_t j = 0; j < d; ++j) xsub[j][i] = xs[j][idx[i]];
        }
        try {
            auto cand = lqr_detail::weighted_solve(ys, xsub, ones, 0.5);
            std::vector<double> rc;
            lqr_detail::residuals_of(y, xs, cand, rc);
            double lc = check_loss(alpha, rc);
            if (lc < loss) {
                beta = std::move(cand);
                loss = lc;
            }
        } catch (const std::domain_error&) {
            // interpolation system singular; keep the smoothed solution
        }
    }

    // undo the covariate scaling
    for (std::size_t j = 0; j < d; ++j) {
        beta[j + 1] /= scale[j];
        beta[0] -= beta[j + 1] * shift[j];
    }
    fit.beta = beta;
    fit.loss = loss;
    fit.iterations = total_iters;
    fit.converged = true;

    if (bootstrap_se > 0) {
        std::vector<std::vector<double>> betas(bootstrap_se);
        parallel_for(static_cast<std::size_t>(bootstrap_se), [&](std::size_t b) {
            Rng rng(seed + 7919 * (b + 1));
            std::vector<double> yb(n);
            std::vector<std::vector<double>> xb(d, std::vector<double>(n));
            for (std::size_t i = 0; i < n; ++i) {
                auto pick = static_cast<std::size_t>(rng.uniform() * n);
                if (pick >= n) pick = n - 1;
                yb[i] = y[pick];
                for (std::size_t j = 0; j < d; ++j) xb[j][i] = xcols[j][pick];
            }
            betas[b] = fit_lqr(yb, xb, alpha, 0).beta;
        });
        fit.std_error.assign(d + 1, 0.0);
        for (std::size_t j = 0; j <= d; ++j) {
            std::vector<double> col(bootstrap_se);
            for (int b = 0; b < bootstrap_se; ++b) col[b] = betas[b][j];
            fit.std_error[j] = sample_sd(col);
        }
    }
    return fit;
}

inline double predict_quantile_lqr(const QuantileRegressionFit& fit,
                                   std::span<const double> x) {
    if (x.size() + 1 != fit.beta.size())
        throw std::invalid_argument("predict_quantile_lqr: covariate length mismatch");
    double p = fit.beta[0];
    for (std::size_t j = 0; j < x.size(); ++j) p += fit.beta[j + 1] * x[j];
    return p;
}

// Grid of per-level fits. Inversion refits at interior levels on demand, so
// the grid carries a fitter closure; data-backed grids capture their data.
// On-demand fits are memoized: the bisection midpoints form a shared binary
// subdivision of the level range, so records reuse each other's fits.
struct QuantileGrid {
    std::vector<double> levels;
    std::vector<QuantileRegressionFit> fits;
    std::function<QuantileRegressionFit(double)> fitter;
    mutable std::map<double, QuantileRegressionFit> cache;

    static QuantileGrid from_data(const std::vector<double>& y,
                                  const std::vector<std::vector<double>>& xcols,
                                  std::vector<double> alpha_levels) {
        QuantileGrid g;
        std::sort(alpha_levels.begin(), alpha_levels.end());
        g.levels = std::move(alpha_levels);
        g.fitter = [y, xcols](double a) { return fit_lqr(y, xcols, a); };
        for (double a : g.levels) g.fits.push_back(g.fitter(a));
        return g;
    }

    static QuantileGrid synthetic(std::function<QuantileRegressionFit(double)> f,
                                  std::vector<double> alpha_levels) {
        QuantileGrid g;
        std::sort(alpha_levels.begin(), alpha_levels.end());
        g.levels = std::move(alpha_levels);
        g.fitter = std::move(f);
        for (double a : g.levels) g.fits.push_back(g.fitter(a));
        return g;
    }

    const QuantileRegressionFit& at(double alpha) const {
        for (std::size_t i = 0; i < levels.size(); ++i)
            if (levels[i] == alpha) return fits[i];
        auto it = cache.find(alpha);
        if (it == cache.end()) it = cache.emplace(alpha, fitter(alpha)).first;
        return it->second;
    }
};

enum class InversionStatus { found, not_found, multiple };

struct InversionResult {
    InversionStatus status = InversionStatus::not_found;
    double alpha = 0.0;
    double predicted = 0.0;
    int iterations = 0;
    std::string diagnostic;
};

// Invert the fitted quantile surface at x for a target c: bracket on the
// grid span, expand toward (0,1) when the target lies outside, then bisect
// with on-demand midpoint fits.
inline InversionResult invert_lqr_bisection(const QuantileGrid& grid, double c,
                                            std::span<const double> x,
                                            double tol = 1e-6, int max_iter = 200) {
    if (grid.levels.empty())
        throw std::invalid_argument("invert_lqr_bisection: empty grid");
    if (!(tol > 0.0)) throw std::invalid_argument("invert_lqr_bisection: tol must be > 0");
    InversionResult out;

    std::vector<double> preds;
    preds.reserve(grid.levels.size());
    for (const auto& f : grid.fits) preds.push_back(predict_quantile_lqr(f, x));

    // a non-monotone prediction profile cannot be inverted uniquely
    bool increasing = true, hit_twice = false;
    for (std::size_t i = 1; i < preds.size(); ++i)
        if (preds[i] < preds[i - 1]) increasing = false;
    if (!increasing) {
        int crossings = 0;
        for (std::size_t i = 1; i < preds.size(); ++i) {
            bool lo = std::min(preds[i - 1], preds[i]) <= c;
            bool hi = std::max(preds[i - 1], preds[i]) >= c;
            if (lo && hi) ++crossings;
        }
        hit_twice = crossings > 1;
        if (hit_twice) {
            out.status = InversionStatus::multiple;
            out.diagnostic = "quantile crossing: " + std::to_string(crossings) +
                             " grid segments bracket the target";
            return out;
        }
    }

    double a = grid.levels.front(), b = grid.levels.back();
    double qa = preds.front(), qb = preds.back();

    // expansion toward the open ends, halving the distance to 0 and 1
    int expansions = 0;
    while (c < qa && a > 1e-4 && expansions < 12) {
        a *= 0.5;
        qa = predict_quantile_lqr(grid.at(a), x);
        ++expansions;
    }
    while (c > qb && b < 1.0 - 1e-4 && expansions < 24) {
        b = 0.5 * (1.0 + b);
        qb = predict_quantile_lqr(grid.at(b), x);
        ++expansions;
    }
    if (c < qa || c > qb) {
        out.status = InversionStatus::not_found;
        out.diagnostic = "target outside the span of grid predictions [" +
                         std::to_string(qa) + ", " + std::to_string(qb) + "]";
        return out;
    }

    int iter = 0;
    while (b - a > tol && iter < max_iter) {
        ++iter;
        double mid = 0.5 * (a + b);
        double qm = predict_quantile_lqr(grid.at(mid), x);
        if (qm < c) { a = mid; qa = qm; }
        else { b = mid; qb = qm; }
    }
    out.status = iter >= max_iter && b - a > tol ? InversionStatus::not_found
                                                 : InversionStatus::found;
    out.alpha = 0.5 * (a + b);
    out.predicted = predict_quantile_lqr(grid.at(out.alpha), x);
    out.iterations = iter;
    if (out.status == InversionStatus::not_found)
        out.diagnostic = "iteration cap reached; last bracket [" + std::to_string(a) +
                         ", " + std::to_string(b) + "]";
    return out;
}

struct CrossingReport {
    struct Item {
        std::size_t x_index;
        double alpha_low, alpha_high;
        double pred_low, pred_high;
    };
    std::vector<Item> crossings;
    std::size_t n_points = 0;
};

inline CrossingReport detect_quantile_crossing(
    const QuantileGrid& grid, const std::vector<std::vector<double>>& points) {
    if (grid.levels.size() < 2)
        throw std::invalid_argument("detect_quantile_crossing: need >= 2 levels");
    CrossingReport rep;
    rep.n_points = points.size();
    for (std::size_t p = 0; p < points.size(); ++p) {
        std::vector<double> preds;
        for (const auto& f : grid.fits)
            preds.push_back(predict_quantile_lqr(f, points[p]));
        for (std::size_t i = 0; i < preds.size(); ++i)
            for (std::size_t j = i + 1; j < preds.size(); ++j)
                if (preds[i] > preds[j])
                    rep.crossings.push_back({p, grid.levels[i], grid.levels[j],
                                             preds[i], preds[j]});
    }
    return rep;
}

} // namespace tailvine
