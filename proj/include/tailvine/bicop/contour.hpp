#pragma once

#include <string>
#include <vector>

#include "tailvine/bicop/bicop.hpp"

namespace tailvine {

// Copula density transformed to standard normal margins,
// g(z1, z2) = c(Phi(z1), Phi(z2)) phi(z1) phi(z2); elliptical level sets
// signal agreement with a Gaussian copula.
struct ContourGrid {
    std::vector<double> z;                    // shared axis
    std::vector<std::vector<double>> density; // density[i][j] = g(z[i], z[j])
};

inline ContourGrid normalized_contour_grid(const BivariateCopula& c, int n = 41,
                                           double z_range = 3.0) {
    if (n < 2) throw std::invalid_argument("normalized_contour_grid: n must be >= 2");
    ContourGrid g;
    g.z.resize(n);
    for (int i = 0; i < n; ++i)
        g.z[i] = -z_range + 2.0 * z_range * i / (n - 1.0);
    g.density.assign(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g.density[i][j] = copula_density(c, norm_cdf(g.z[i]), norm_cdf(g.z[j])) *
                              norm_pdf(g.z[i]) * norm_pdf(g.z[j]);
    return g;
}

// coarse ASCII shading, darker character = more mass
inline std::string ascii_contour(const ContourGrid& g) {
    static const char shades[] = " .:-=+*#%@";
    double peak = 0.0;
    for (const auto& row : g.density)
        for (double d : row) peak = std::max(peak, d);
    std::string out;
    for (std::size_t j = g.z.size(); j-- > 0;) {
        for (std::size_t i = 0; i < g.z.size(); ++i) {
            int level = peak > 0.0
                            ? static_cast<int>(9.0 * g.density[i][j] / peak + 0.5)
                            : 0;
            out += shades[std::min(9, std::max(0, level))];
        }
        out += '\n';
    }
    return out;
}

} // namespace tailvine
