#pragma once

// Independent numerical oracles used across the test suites. These stay
// deliberately naive (finite differences, tensor quadrature, brute-force
// simulation) so they exercise a different code path than the library.

#include <cmath>
#include <functional>
#include <vector>

#include "tailvine/math/quadrature.hpp"

namespace oracle {

// central finite difference dC/dv
inline double fd_partial_v(const std::function<double(double, double)>& C, double u,
                           double v, double h = 1e-6) {
    return (C(u, v + h) - C(u, v - h)) / (2.0 * h);
}

// mixed second difference d2C/du dv
inline double fd_mixed(const std::function<double(double, double)>& C, double u,
                       double v, double h = 1e-4) {
    return (C(u + h, v + h) - C(u + h, v - h) - C(u - h, v + h) + C(u - h, v - h)) /
           (4.0 * h * h);
}

// tensorized integral of f over [a1,b1] x [a2,b2]
inline double integrate2d(const std::function<double(double, double)>& f, double a1,
                          double b1, double a2, double b2, double tol = 1e-9) {
    auto outer = [&](double x) {
        return tailvine::integrate([&](double y) { return f(x, y); }, a2, b2, tol);
    };
    return tailvine::integrate(outer, a1, b1, tol);
}

} // namespace oracle
