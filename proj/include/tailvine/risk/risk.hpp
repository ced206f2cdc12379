#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tailvine/dvine/dvine.hpp"
#include "tailvine/math/parallel.hpp"
#include "tailvine/math/special.hpp"
#include "tailvine/math/stats.hpp"

namespace tailvine {

// alpha_c(x) = P(Y > c | X = x), evaluated analytically through the vine's
// survival chain rather than as 1 - cdf
inline double critical_event_probability(const DVineRegressionModel& model, double c,
                                         const std::vector<double>& x) {
    if (!std::isfinite(c))
        throw std::invalid_argument("critical_event_probability: threshold must be finite");
    return conditional_exceedance(model, c, x);
}

struct RiskRecord {
    std::size_t row = 0;
    double alpha = 0.0; // exceedance probability estimate
    bool below_floor = false;
    double logit_alpha = 0.0; // meaningful only when not below_floor
    bool risky = false;
};

struct RiskReport {
    double threshold = 0.0;
    double p_threshold = 0.0;
    double floor = 0.0;
    std::vector<RiskRecord> records;
    std::size_t n_risky = 0;
    std::size_t n_above_floor = 0;
    double max_alpha = 0.0;
};

// Per-record exceedance probabilities with the risky flag alpha > p_threshold
// and the count of estimates above the reporting floor. Estimates below the
// floor are reported as the interval [0, floor) rather than an exact zero.
inline RiskReport identify_risky(const DVineRegressionModel& model,
                                 const std::vector<std::vector<double>>& x_cols,
                                 std::size_t n_rows, double c, double p_threshold,
                                 double floor = 1e-13) {
    if (!(p_threshold > 0.0 && p_threshold <= 1.0))
        throw std::invalid_argument("identify_risky: p_threshold must lie in (0,1]");
    for (int k : model.order)
        if (static_cast<std::size_t>(k) >= x_cols.size() ||
            x_cols[k].size() != n_rows)
            throw std::invalid_argument("identify_risky: dataset lacks covariate column " +
                                        std::to_string(k));
    RiskReport rep;
    rep.threshold = c;
    rep.p_threshold = p_threshold;
    rep.floor = floor;
    rep.records.resize(n_rows);

    parallel_for(n_rows, [&](std::size_t i) {
        std::vector<double> x(model.covariate_margins.size(),
                              std::numeric_limits<double>::quiet_NaN());
        for (int k : model.order) x[k] = x_cols[k][i];
        double a = critical_event_probability(model, c, x);
        RiskRecord r;
        r.row = i;
        r.alpha = a;
        r.below_floor = !(a >= floor);
        r.logit_alpha = r.below_floor ? -std::numeric_limits<double>::infinity()
                                      : logit(std::min(a, 1.0 - 1e-16));
        r.risky = a > p_threshold;
        rep.records[i] = r;
    });
    for (const auto& r : rep.records) {
        if (r.risky) ++rep.n_risky;
        if (!r.below_floor) ++rep.n_above_floor;
        rep.max_alpha = std::max(rep.max_alpha, r.alpha);
    }
    return rep;
}

// Column-wise standardization with the n-1 denominator. By default this is
// applied to the subgroup passed in (the risky rows), not the full sample.
inline std::vector<std::vector<double>> standardize(
    const std::vector<std::vector<double>>& cols) {
    std::vector<std::vector<double>> z(cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const auto& c = cols[j];
        if (c.size() < 2)
            throw std::invalid_argument("standardize: need at least 2 rows");
        double m = mean(c);
        double sd = sample_sd(c);
        if (!(sd > 0.0))
            throw std::invalid_argument("standardize: column " + std::to_string(j) +
                                        " is constant");
        z[j].resize(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) z[j][i] = (c[i] - m) / sd;
    }
    return z;
}

struct RankingResult {
    std::vector<std::string> names; // "(Intercept)" first
    std::vector<double> estimate;
    std::vector<double> std_error;
    std::vector<double> t_value;
    std::vector<double> p_value;
    double adj_r_squared = 0.0;
    double r_squared = 0.0;
    std::vector<std::size_t> ranking; // indices into names, descending |estimate|
};

// OLS of eta on standardized columns with classical inference; the ranking
// orders the non-intercept coefficients by absolute size.
inline RankingResult ols_rank(const std::vector<double>& eta,
                              const std::vector<std::vector<double>>& z_cols,
                              const std::vector<std::string>& col_names = {}) {
    const std::size_t n = eta.size();
    const std::size_t k = z_cols.size() + 1;
    if (n <= k)
        throw std::invalid_argument("ols_rank: need more rows than coefficients");
    for (const auto& c : z_cols)
        if (c.size() != n) throw std::invalid_argument("ols_rank: ragged design");

    std::vector<double> xtx(k * k, 0.0), xty(k, 0.0), row(k);
    for (std::size_t i = 0; i < n; ++i) {
        row[0] = 1.0;
        for (std::size_t j = 1; j < k; ++j) row[j] = z_cols[j - 1][i];
        for (std::size_t a = 0; a < k; ++a) {
            xty[a] += row[a] * eta[i];
            for (std::size_t b = a; b < k; ++b) xtx[a * k + b] += row[a] * row[b];
        }
    }
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < a; ++b) xtx[a * k + b] = xtx[b * k + a];

    // Cholesky factor and inverse of X'X
    std::vector<double> L(k * k, 0.0);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b <= a; ++b) {
            double s = xtx[a * k + b];
            for (std::size_t c = 0; c < b; ++c) s -= L[a * k + c] * L[b * k + c];
            if (a == b) {
                if (s <= 1e-10 * (std::fabs(xtx[a * k + a]) + 1.0)) {
                    std::string cols;
                    for (std::size_t j = 0; j < z_cols.size(); ++j)
                        if (std::fabs(kendall_tau(z_cols[a - 1], z_cols[j])) > 0.999 &&
                            j != a - 1)
                            cols += " " + std::to_string(j);
                    throw std::domain_error("ols_rank: design is rank deficient; column " +
                                            std::to_string(a - 1) +
                                            " is collinear with" +
                                            (cols.empty() ? " the intercept" : cols));
                }
                L[a * k + a] = std::sqrt(s);
            } else {
                L[a * k + b] = s / L[b * k + b];
            }
        }
    }
    auto solve = [&](std::vector<double> rhs) {
        std::vector<double> zv(k), out(k);
        for (std::size_t a = 0; a < k; ++a) {
            double s = rhs[a];
            for (std::size_t c = 0; c < a; ++c) s -= L[a * k + c] * zv[c];
            zv[a] = s / L[a * k + a];
        }
        for (std::size_t a = k; a-- > 0;) {
            double s = zv[a];
            for (std::size_t c = a + 1; c < k; ++c) s -= L[c * k + a] * out[c];
            out[a] = s / L[a * k + a];
        }
        return out;
    };

    RankingResult res;
    res.estimate = solve(xty);

    double ss_res = 0.0, ss_tot = 0.0;
    double ybar = mean(eta);
    for (std::size_t i = 0; i < n; ++i) {
        double pred = res.estimate[0];
        for (std::size_t j = 1; j < k; ++j) pred += res.estimate[j] * z_cols[j - 1][i];
        ss_res += (eta[i] - pred) * (eta[i] - pred);
        ss_tot += (eta[i] - ybar) * (eta[i] - ybar);
    }
    double dof = static_cast<double>(n - k);
    double sigma2 = ss_res / dof;
    res.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    res.adj_r_squared = 1.0 - (1.0 - res.r_squared) * (n - 1.0) / dof;

    // diagonal of (X'X)^-1 via unit solves
    res.std_error.resize(k);
    res.t_value.resize(k);
    res.p_value.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<double> e(k, 0.0);
        e[j] = 1.0;
        double diag = solve(e)[j];
        res.std_error[j] = std::sqrt(std::max(0.0, sigma2 * diag));
        res.t_value[j] = res.std_error[j] > 0.0 ? res.estimate[j] / res.std_error[j] : 0.0;
        res.p_value[j] = 2.0 * t_cdf(-std::fabs(res.t_value[j]), dof);
    }

    res.names.resize(k);
    res.names[0] = "(Intercept)";
    for (std::size_t j = 1; j < k; ++j)
        res.names[j] = j - 1 < col_names.size() ? col_names[j - 1]
                                                : "z" + std::to_string(j - 1);
    res.ranking.resize(k - 1);
    std::iota(res.ranking.begin(), res.ranking.end(), 1);
    std::sort(res.ranking.begin(), res.ranking.end(), [&](std::size_t a, std::size_t b) {
        return std::fabs(res.estimate[a]) > std::fabs(res.estimate[b]);
    });
    return res;
}

// tie-corrected empirical Kendall's tau (re-export under the domain name)
inline double empirical_kendall_tau(std::span<const double> x,
                                    std::span<const double> y) {
    return kendall_tau(x, y);
}

} // namespace tailvine
