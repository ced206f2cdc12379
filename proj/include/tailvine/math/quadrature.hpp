#pragma once

#include <cmath>
#include <utility>

namespace tailvine {

namespace detail {

// Gauss-Kronrod 7-15 on [-1,1]
inline constexpr double kronrod_x[8] = {
    0.0,
    0.2077849550078985, 0.4058451513773972, 0.5860872354676911,
    0.7415311855993944, 0.8648644233597691, 0.9491079123427585,
    0.9914553711208126};
inline constexpr double kronrod_w[8] = {
    0.2094821410847278,
    0.2044329400752989, 0.1903505780647854, 0.1690047266392679,
    0.1406532597155259, 0.1047900103222502, 0.0630920926299786,
    0.0229353220105292};
inline constexpr double gauss_w[4] = {
    0.4179591836734694, 0.3818300505051189, 0.2797053914892767,
    0.1294849661688697};

template <class F>
std::pair<double, double> gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fc = f(c);
    double resk = kronrod_w[0] * fc;
    double resg = gauss_w[0] * fc;
    for (int i = 1; i < 8; ++i) {
        double fl = f(c - h * kronrod_x[i]);
        double fr = f(c + h * kronrod_x[i]);
        resk += kronrod_w[i] * (fl + fr);
        if (i % 2 == 0) resg += gauss_w[i / 2] * (fl + fr);
    }
    return {resk * h, std::fabs(resk - resg) * h};
}

template <class F>
double integrate_rec(const F& f, double a, double b, double tol, int depth,
                     int& budget) {
    auto [val, err] = gk15(f, a, b);
    if (err <= tol || depth >= 40 || budget <= 0) return val;
    --budget;
    double m = 0.5 * (a + b);
    return integrate_rec(f, a, m, 0.5 * tol, depth + 1, budget) +
           integrate_rec(f, m, b, 0.5 * tol, depth + 1, budget);
}

} // namespace detail

// adaptive Gauss-Kronrod on a finite interval; the subdivision budget keeps
// the cost bounded when roundoff noise defeats the error estimate
template <class F>
double integrate(const F& f, double a, double b, double tol = 1e-10) {
    if (a == b) return 0.0;
    // seed with a 4-panel split so narrow features are not missed
    double total = 0.0;
    double h = (b - a) / 4.0;
    int budget = 20000;
    for (int i = 0; i < 4; ++i)
        total += detail::integrate_rec(f, a + i * h, a + (i + 1) * h, tol / 4.0, 0,
                                       budget);
    return total;
}

} // namespace tailvine
