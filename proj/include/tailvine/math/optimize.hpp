#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace tailvine {

struct ScalarMin {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Brent minimization on [lo, hi]; derivative-free.
template <class F>
ScalarMin brent_minimize(const F& f, double lo, double hi, double xtol = 1e-6,
                         int max_iter = 200) {
    const double gold = 0.3819660112501051;
    double a = lo, b = hi;
    double x = a + gold * (b - a), w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;
    ScalarMin out;
    for (int iter = 0; iter < max_iter; ++iter) {
        double m = 0.5 * (a + b);
        double tol1 = xtol * std::fabs(x) + 1e-12;
        double tol2 = 2.0 * tol1;
        if (std::fabs(x - m) <= tol2 - 0.5 * (b - a)) {
            out = {x, fx, iter, true};
            return out;
        }
        double p = 0.0, q = 0.0, r = 0.0;
        bool use_golden = true;
        if (std::fabs(e) > tol1) {
            r = (x - w) * (fx - fv);
            q = (x - v) * (fx - fw);
            p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::fabs(q);
            double etmp = e;
            e = d;
            if (std::fabs(p) < std::fabs(0.5 * q * etmp) && p > q * (a - x) &&
                p < q * (b - x)) {
                d = p / q;
                double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = (m > x) ? tol1 : -tol1;
                use_golden = false;
            }
        }
        if (use_golden) {
            e = (x < m) ? b - x : a - x;
            d = gold * e;
        }
        double u = (std::fabs(d) >= tol1) ? x + d : x + ((d > 0.0) ? tol1 : -tol1);
        double fu = f(u);
        if (fu <= fx) {
            if (u < x) b = x; else a = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    out = {x, fx, max_iter, false};
    return out;
}

struct VectorMin {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Nelder-Mead with box constraints applied by clamping candidate vertices.
inline VectorMin nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const std::vector<double>& lo,
                             const std::vector<double>& hi, double tol = 1e-6,
                             int max_iter = 200) {
    const std::size_t n = x0.size();
    auto clamp = [&](std::vector<double>& x) {
        for (std::size_t i = 0; i < n; ++i) x[i] = std::min(std::max(x[i], lo[i]), hi[i]);
    };
    clamp(x0);

    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) {
        double step = 0.1 * std::max(1e-3, hi[i] - lo[i]) * 0.5;
        simplex[i + 1][i] = std::min(hi[i], x0[i] + step);
        if (simplex[i + 1][i] == x0[i]) simplex[i + 1][i] = std::max(lo[i], x0[i] - step);
    }
    std::vector<double> fvals(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fvals[i] = f(simplex[i]);

    int iter = 0;
    for (; iter < max_iter; ++iter) {
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
        std::vector<std::vector<double>> s2(n + 1);
        std::vector<double> f2(n + 1);
        for (std::size_t i = 0; i <= n; ++i) { s2[i] = simplex[idx[i]]; f2[i] = fvals[idx[i]]; }
        simplex.swap(s2);
        fvals.swap(f2);

        double spread = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            spread = std::max(spread, std::fabs(simplex[n][i] - simplex[0][i]));
        if (spread < tol && std::fabs(fvals[n] - fvals[0]) < tol * (1.0 + std::fabs(fvals[0])))
            break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / n;

        auto blend = [&](double coef) {
            std::vector<double> x(n);
            for (std::size_t j = 0; j < n; ++j)
                x[j] = centroid[j] + coef * (simplex[n][j] - centroid[j]);
            clamp(x);
            return x;
        };

        auto xr = blend(-1.0);
        double fr = f(xr);
        if (fr < fvals[0]) {
            auto xe = blend(-2.0);
            double fe = f(xe);
            if (fe < fr) { simplex[n] = xe; fvals[n] = fe; }
            else { simplex[n] = xr; fvals[n] = fr; }
        } else if (fr < fvals[n - 1]) {
            simplex[n] = xr; fvals[n] = fr;
        } else {
            auto xc = blend(fr < fvals[n] ? -0.5 : 0.5);
            double fc = f(xc);
            if (fc < std::min(fr, fvals[n])) {
                simplex[n] = xc; fvals[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j)
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    clamp(simplex[i]);
                    fvals[i] = f(simplex[i]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fvals[i] < fvals[best]) best = i;
    return {simplex[best], fvals[best], iter, iter < max_iter};
}

// Bisection for a continuous monotone function; returns x with f(x) = target.
template <class F>
double bisect_root(const F& f, double lo, double hi, double target, double xtol = 1e-12,
                   int max_iter = 200) {
    double flo = f(lo) - target;
    double fhi = f(hi) - target;
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0)
        throw std::runtime_error("bisect_root: target not bracketed");
    for (int i = 0; i < max_iter; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid) - target;
        if (fm == 0.0 || (hi - lo) < xtol) return mid;
        if ((fm < 0.0) == (flo < 0.0)) { lo = mid; flo = fm; }
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace tailvine
