#pragma once

// D-vine regression model with the response fixed as the first node of the
// path V - U_{k1} - ... - U_{km}. Conditional distribution and quantile are
// evaluated through nested h-functions and their inverses; the path order
// makes every conditioning set contiguous, so two triangular arrays of
// conditionals cover all required terms.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "tailvine/bicop/bicop.hpp"
#include "tailvine/margins/margins.hpp"
#include "tailvine/math/rng.hpp"

namespace tailvine {

struct VineEdge {
    BivariateCopula cop;
    double loglik = 0.0; // training log-likelihood of this pair
};

struct StepStats {
    int covariate = -1; // original column index
    double edge_loglik = 0.0;
    int edge_params = 0;
    double edge_tau = 0.0;
    double cll = 0.0; // cumulative conditional log-likelihood after the step
    double cll_aic = 0.0;
    double cll_bic = 0.0;
    double p_value = 1.0; // likelihood-ratio test of the step's response edge
};

struct DVineRegressionModel {
    std::vector<int> order; // selected covariates, original column indices
    // trees[t-1][i] couples (z_i, z_{i+t}) given z_{i+1..i+t-1}, where z_0 is
    // the response PIT and z_t the PIT of order[t-1]
    std::vector<std::vector<VineEdge>> trees;
    MarginalModel response_margin;
    std::vector<MarginalModel> covariate_margins; // by original column index
    std::vector<StepStats> fit_stats;
    std::size_t n_train = 0;

    std::size_t dimension() const { return order.size(); }

    // parameters of the whole fitted vine; the AIC/BIC-corrected cll
    // penalizes every fitted edge
    int copula_param_count() const {
        int p = 0;
        for (const auto& level : trees)
            for (const auto& e : level) p += e.cop.n_params();
        return p;
    }

    // parameters entering the conditional density (response edges only)
    int response_param_count() const {
        int p = 0;
        for (std::size_t t = 0; t < trees.size(); ++t)
            p += trees[t][0].cop.n_params();
        return p;
    }

    void validate() const {
        const std::size_t m = order.size();
        if (trees.size() != m)
            throw std::logic_error("dvine: expected one tree level per covariate");
        for (std::size_t t = 1; t <= m; ++t)
            if (trees[t - 1].size() != m + 1 - t)
                throw std::logic_error("dvine: tree " + std::to_string(t) +
                                       " must hold " + std::to_string(m + 1 - t) +
                                       " edges");
        for (int k : order)
            if (k < 0 || static_cast<std::size_t>(k) >= covariate_margins.size())
                throw std::logic_error("dvine: covariate index out of range");
    }
};

namespace dvine_detail {

// conditional distributions F(z_t | z_1..z_{t-1}) along the covariate chain
// (excluding the response), for one observation's PIT values u[0..m-1]
inline std::vector<double> covariate_conditionals(const DVineRegressionModel& model,
                                                  const std::vector<double>& u) {
    const std::size_t m = u.size();
    std::vector<double> out(m + 1, 0.0);
    if (m == 0) return out;
    // A[i][j] = F(z_i | z_{i+1..j}), B[j][i] = F(z_j | z_{i..j-1}), 1-based
    std::vector<std::vector<double>> A(m + 1, std::vector<double>(m + 1, 0.0));
    std::vector<std::vector<double>> B(m + 1, std::vector<double>(m + 1, 0.0));
    for (std::size_t i = 1; i <= m; ++i) A[i][i] = B[i][i] = clamp_unit(u[i - 1]);
    for (std::size_t s = 1; s < m; ++s) {
        for (std::size_t i = 1; i + s <= m; ++i) {
            std::size_t j = i + s;
            const auto& e = model.trees[s - 1][i]; // couples (z_i, z_j)
            double left = A[i][j - 1];
            double right = B[j][i + 1];
            A[i][j] = hfunc(e.cop, HSide::first_given_second, left, right);
            B[j][i] = hfunc(e.cop, HSide::second_given_first, right, left);
        }
    }
    for (std::size_t t = 1; t <= m; ++t) out[t] = B[t][1];
    return out;
}

// C(v | u) through the response chain, optionally accumulating the log
// conditional density
inline double cond_cdf_core(const DVineRegressionModel& model, double v,
                            const std::vector<double>& cond, double* log_dens) {
    double a = clamp_unit(v);
    if (log_dens) *log_dens = 0.0;
    for (std::size_t t = 1; t <= model.order.size(); ++t) {
        const auto& e = model.trees[t - 1][0];
        if (log_dens) *log_dens += copula_log_density(e.cop, a, cond[t]);
        a = hfunc(e.cop, HSide::first_given_second, a, cond[t]);
    }
    return a;
}

inline double cond_quantile_core(const DVineRegressionModel& model, double alpha,
                                 const std::vector<double>& cond) {
    double b = clamp_unit(alpha);
    for (std::size_t t = model.order.size(); t >= 1; --t) {
        const auto& e = model.trees[t - 1][0];
        b = hinv(e.cop, HSide::first_given_second, b, cond[t]);
    }
    return b;
}

inline std::vector<double> pit_row(const DVineRegressionModel& model,
                                   const std::vector<double>& x) {
    std::vector<double> u(model.order.size());
    for (std::size_t t = 0; t < model.order.size(); ++t) {
        int k = model.order[t];
        if (static_cast<std::size_t>(k) >= x.size() || std::isnan(x[k]))
            throw std::invalid_argument("dvine: missing value for covariate index " +
                                        std::to_string(k));
        u[t] = clamp_unit(margin_cdf(model.covariate_margins[k], x[k]));
    }
    return u;
}

} // namespace dvine_detail

// F(y | X = x) on the copula scale given covariate PITs in model order
inline double conditional_cdf_pit(const DVineRegressionModel& model, double v,
                                  const std::vector<double>& u) {
    model.validate();
    if (u.size() != model.order.size())
        throw std::invalid_argument("conditional_cdf_pit: wrong PIT dimension");
    auto cond = dvine_detail::covariate_conditionals(model, u);
    return dvine_detail::cond_cdf_core(model, v, cond, nullptr);
}

inline double conditional_quantile_pit(const DVineRegressionModel& model, double alpha,
                                       const std::vector<double>& u) {
    model.validate();
    if (u.size() != model.order.size())
        throw std::invalid_argument("conditional_quantile_pit: wrong PIT dimension");
    auto cond = dvine_detail::covariate_conditionals(model, u);
    return dvine_detail::cond_quantile_core(model, alpha, cond);
}

// F_{Y|X}(y | x); x is indexed by original covariate column
inline double conditional_cdf(const DVineRegressionModel& model, double y,
                              const std::vector<double>& x) {
    model.validate();
    double v = clamp_unit(margin_cdf(model.response_margin, y));
    if (model.order.empty()) return v;
    return conditional_cdf_pit(model, v, dvine_detail::pit_row(model, x));
}

// P(Y > c | X = x) evaluated on the survival side of every h-function, so
// the result stays meaningful far below the unit-interval clamping floor
inline double conditional_exceedance(const DVineRegressionModel& model, double c,
                                     const std::vector<double>& x) {
    model.validate();
    double s = margin_sf(model.response_margin, c);
    if (model.order.empty()) return s;
    auto u = dvine_detail::pit_row(model, x);
    auto cond = dvine_detail::covariate_conditionals(model, u);
    for (std::size_t t = 1; t <= model.order.size(); ++t)
        s = hfunc_survival(model.trees[t - 1][0].cop, HSide::first_given_second, s,
                           cond[t]);
    return s;
}

struct ConditionalQuantile {
    double value = 0.0;
    bool clamped = false;
};

inline ConditionalQuantile conditional_quantile_flagged(const DVineRegressionModel& model,
                                                        double alpha,
                                                        const std::vector<double>& x) {
    model.validate();
    ConditionalQuantile out;
    if (alpha <= 0.0 || alpha >= 1.0) {
        out.clamped = true;
        alpha = clamp_unit(alpha);
    }
    double w = model.order.empty()
                   ? alpha
                   : conditional_quantile_pit(model, alpha, dvine_detail::pit_row(model, x));
    auto q = margin_quantile_flagged(model.response_margin, w);
    out.value = q.value;
    out.clamped = out.clamped || q.clamped;
    return out;
}

inline double conditional_quantile(const DVineRegressionModel& model, double alpha,
                                   const std::vector<double>& x) {
    return conditional_quantile_flagged(model, alpha, x).value;
}

// conditional log-likelihood sum log c_{V|U}(v_i | u_i) on raw data
inline double cll(const DVineRegressionModel& model, const std::vector<double>& y,
                  const std::vector<std::vector<double>>& x_cols) {
    model.validate();
    if (y.empty()) throw std::invalid_argument("cll: empty data");
    for (int k : model.order)
        if (static_cast<std::size_t>(k) >= x_cols.size() || x_cols[k].size() != y.size())
            throw std::invalid_argument("cll: covariate column " + std::to_string(k) +
                                        " missing or of wrong length");
    const std::size_t n = y.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double v = clamp_unit(margin_cdf(model.response_margin, y[i]));
        std::vector<double> u(model.order.size());
        for (std::size_t t = 0; t < model.order.size(); ++t) {
            int k = model.order[t];
            u[t] = clamp_unit(margin_cdf(model.covariate_margins[k], x_cols[k][i]));
        }
        auto cond = dvine_detail::covariate_conditionals(model, u);
        double ld = 0.0;
        dvine_detail::cond_cdf_core(model, v, cond, &ld);
        total += ld;
    }
    return total;
}

inline double cll_aic(const DVineRegressionModel& model, const std::vector<double>& y,
                      const std::vector<std::vector<double>>& x_cols) {
    return -2.0 * cll(model, y, x_cols) + 2.0 * model.copula_param_count();
}

inline double cll_bic(const DVineRegressionModel& model, const std::vector<double>& y,
                      const std::vector<std::vector<double>>& x_cols) {
    return -2.0 * cll(model, y, x_cols) +
           std::log(static_cast<double>(y.size())) * model.copula_param_count();
}

struct DVineSimulation {
    std::vector<double> y;
    std::vector<std::vector<double>> x_cols; // one column per selected covariate
    std::vector<int> covariate_indices;      // original column of each x column
};

// joint simulation of (Y, X_selected); deterministic per seed
inline DVineSimulation simulate_dvine(const DVineRegressionModel& model, std::size_t n,
                                      std::uint64_t seed) {
    model.validate();
    const std::size_t m = model.order.size();
    Rng rng(seed);
    DVineSimulation out;
    out.y.resize(n);
    out.x_cols.assign(m, std::vector<double>(n));
    out.covariate_indices = model.order;

    std::vector<double> z(m + 1), P(m + 1), Pnew(m + 1), fwd(m + 1);
    for (std::size_t i = 0; i < n; ++i) {
        // P[j] = F(z_j | z_{j+1..cur-1}) over the already drawn prefix
        for (std::size_t cur = 0; cur <= m; ++cur) {
            double w = rng.uniform();
            // invert the chain of h-functions conditioning z_cur on the prefix
            double b = w;
            for (std::size_t t = cur; t >= 1; --t) {
                const auto& e = model.trees[t - 1][cur - t]; // (z_{cur-t}, z_cur)
                b = hinv(e.cop, HSide::second_given_first, b, P[cur - t]);
            }
            z[cur] = b;

            // forward chain fwd[t] = F(z_cur | z_{cur-t..cur-1})
            fwd[0] = z[cur];
            for (std::size_t t = 1; t <= cur; ++t) {
                const auto& e = model.trees[t - 1][cur - t];
                fwd[t] = hfunc(e.cop, HSide::second_given_first, fwd[t - 1], P[cur - t]);
            }
            // extend the suffix conditionals to include z_cur
            for (std::size_t j = 0; j < cur; ++j) {
                const auto& e = model.trees[cur - j - 1][j]; // (z_j, z_cur)
                Pnew[j] = hfunc(e.cop, HSide::first_given_second, P[j],
                                fwd[cur - 1 - j]);
            }
            Pnew[cur] = z[cur];
            std::swap(P, Pnew);
        }
        out.y[i] = margin_quantile(model.response_margin, z[0]);
        for (std::size_t t = 0; t < m; ++t)
            out.x_cols[t][i] =
                margin_quantile(model.covariate_margins[model.order[t]], z[t + 1]);
    }
    return out;
}

} // namespace tailvine
