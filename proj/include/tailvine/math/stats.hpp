#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "tailvine/math/special.hpp"

namespace tailvine {

inline double mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean: empty input");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// sample standard deviation, n-1 denominator
inline double sample_sd(std::span<const double> x) {
    if (x.size() < 2) throw std::invalid_argument("sample_sd: need at least 2 values");
    double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

namespace detail {

// merge sort counting swaps (discordant pairs among already y-sorted data)
inline std::uint64_t merge_count(std::vector<double>& v, std::vector<double>& buf,
                                 std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            swaps += mid - i;
            buf[k++] = v[j++];
        } else {
            buf[k++] = v[i++];
        }
    }
    while (i < mid) buf[k++] = v[i++];
    while (j < hi) buf[k++] = v[j++];
    std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
    return swaps;
}

inline std::uint64_t tie_pairs(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::uint64_t total = 0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        std::uint64_t t = j - i;
        total += t * (t - 1) / 2;
        i = j;
    }
    return total;
}

} // namespace detail

// Tie-corrected Kendall's tau_b via Knight's O(n log n) algorithm.
inline double kendall_tau(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2)
        throw std::invalid_argument("kendall_tau: need two equal-length series, n >= 2");

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    // joint ties (pairs tied in both) and ties in x
    std::uint64_t ties_xy = 0, ties_x = 0;
    {
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j < n && x[idx[j]] == x[idx[i]]) ++j;
            std::uint64_t t = j - i;
            ties_x += t * (t - 1) / 2;
            std::size_t a = i;
            while (a < j) {
                std::size_t b = a;
                while (b < j && y[idx[b]] == y[idx[a]]) ++b;
                std::uint64_t s = b - a;
                ties_xy += s * (s - 1) / 2;
                a = b;
            }
            i = j;
        }
    }

    std::vector<double> ysorted(n);
    for (std::size_t i = 0; i < n; ++i) ysorted[i] = y[idx[i]];
    std::uint64_t ties_y = detail::tie_pairs(ysorted);

    std::vector<double> buf(n);
    std::uint64_t swaps = detail::merge_count(ysorted, buf, 0, n);

    const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    // concordant minus discordant
    const double num = static_cast<double>(n0) - static_cast<double>(ties_x) -
                       static_cast<double>(ties_y) + static_cast<double>(ties_xy) -
                       2.0 * static_cast<double>(swaps);
    const double den = std::sqrt(static_cast<double>(n0 - ties_x)) *
                       std::sqrt(static_cast<double>(n0 - ties_y));
    if (den == 0.0)
        throw std::invalid_argument("kendall_tau: zero-variance input");
    return num / den;
}

// asymptotic normal test statistic for H0: tau = 0
inline double kendall_tau_z(double tau, std::size_t n) {
    double dn = static_cast<double>(n);
    return std::fabs(tau) * std::sqrt(9.0 * dn * (dn - 1.0) / (2.0 * (2.0 * dn + 5.0)));
}

// Kolmogorov-Smirnov distance of a sample against Uniform(0,1)
inline double ks_uniform_distance(std::vector<double> u) {
    std::sort(u.begin(), u.end());
    const double n = static_cast<double>(u.size());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        d = std::max(d, std::fabs((i + 1.0) / n - u[i]));
        d = std::max(d, std::fabs(u[i] - i / n));
    }
    return d;
}

inline double ks_uniform_pvalue(double d, std::size_t n) {
    double sn = std::sqrt(static_cast<double>(n));
    return kolmogorov_sf(d * (sn + 0.12 + 0.11 / sn));
}

inline std::vector<double> ranks(std::span<const double> x) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> r(x.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j < idx.size() && x[idx[j]] == x[idx[i]]) ++j;
        double avg = 0.5 * (i + j - 1) + 1.0;
        for (std::size_t k = i; k < j; ++k) r[idx[k]] = avg;
        i = j;
    }
    return r;
}

} // namespace tailvine
