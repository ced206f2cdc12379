#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "tailvine/bicop/fit.hpp"
#include "tailvine/dvine/dvine.hpp"
#include "tailvine/math/parallel.hpp"

namespace tailvine {

enum class SelectionCriterion { cll, cll_aic, cll_bic };

inline SelectionCriterion criterion_from_name(const std::string& s) {
    if (s == "cll") return SelectionCriterion::cll;
    if (s == "cll_aic" || s == "aic") return SelectionCriterion::cll_aic;
    if (s == "cll_bic" || s == "bic") return SelectionCriterion::cll_bic;
    throw std::invalid_argument("unknown selection criterion: " + s);
}

struct CandidateRecord {
    int covariate = -1;
    double cll = 0.0;
    double criterion = 0.0; // value of the active criterion for this candidate
};

struct SelectionStepTrace {
    std::vector<CandidateRecord> candidates;
    int chosen = -1; // original column index, -1 when the step rejected all
};

struct SelectionTrace {
    std::vector<SelectionStepTrace> steps;
    std::string stop_reason;
};

struct DVineFitResult {
    DVineRegressionModel model;
    SelectionTrace trace;
};

namespace dvine_detail {

struct CandidateFit {
    std::vector<BicopFit> edges;            // span 1..j, last couples the response
    std::vector<std::vector<double>> rsteps; // rsteps[s] = F(z_cand | last s covariates)
    double edge_ll = 0.0;
    int edge_params = 0;  // response-edge parameters
    int total_params = 0; // all new edges, covariate pairs included
    bool valid = false;
};

inline CandidateFit evaluate_candidate(const std::vector<std::vector<double>>& lmat,
                                       const std::vector<double>& u_cand,
                                       const std::vector<CatalogEntry>& allowed) {
    const std::size_t j = lmat.size(); // new variable lands at position j
    const std::size_t n = u_cand.size();
    CandidateFit out;
    out.rsteps.reserve(j);
    out.rsteps.push_back(u_cand);
    for (std::size_t s = 1; s <= j; ++s) {
        const auto& left = lmat[j - s];  // F(z_{j-s} | z_{j-s+1..j-1})
        const auto& right = out.rsteps[s - 1];
        auto fit = fit_bicop(left, right, allowed);
        out.total_params += fit.copula.n_params();
        if (s < j) {
            std::vector<double> next(n);
            for (std::size_t i = 0; i < n; ++i)
                next[i] = hfunc(fit.copula, HSide::second_given_first, right[i], left[i]);
            out.rsteps.push_back(std::move(next));
        } else {
            out.edge_ll = fit.loglik;
            out.edge_params = fit.copula.n_params();
        }
        out.edges.push_back(std::move(fit));
    }
    out.valid = true;
    return out;
}

inline double criterion_value(SelectionCriterion crit, double cll_val, int params,
                              std::size_t n) {
    switch (crit) {
        case SelectionCriterion::cll: return cll_val;
        case SelectionCriterion::cll_aic: return -2.0 * cll_val + 2.0 * params;
        case SelectionCriterion::cll_bic:
            return -2.0 * cll_val + std::log(static_cast<double>(n)) * params;
    }
    return cll_val;
}

inline bool criterion_improves(SelectionCriterion crit, double cand, double cur) {
    return crit == SelectionCriterion::cll ? cand > cur : cand < cur;
}

} // namespace dvine_detail

// Forward covariate selection: each step appends every unused covariate to
// the path, fits the new edges pairwise, and keeps the candidate that
// improves the criterion most. Previously fitted edges stay frozen. Stops
// when no candidate strictly improves.
inline DVineFitResult fit_dvine_regression(
    const std::vector<double>& y, const std::vector<std::vector<double>>& x_cols,
    const MarginalModel& response_margin,
    const std::vector<MarginalModel>& covariate_margins,
    const std::vector<CatalogEntry>& allowed = default_catalog(),
    SelectionCriterion criterion = SelectionCriterion::cll_aic) {
    const std::size_t n = y.size();
    const std::size_t d = x_cols.size();
    if (n < 30) throw std::invalid_argument("fit_dvine_regression: need n >= 30");
    if (d < 1) throw std::invalid_argument("fit_dvine_regression: need d >= 1");
    if (covariate_margins.size() != d)
        throw std::invalid_argument("fit_dvine_regression: one margin per covariate");
    for (const auto& col : x_cols)
        if (col.size() != n)
            throw std::invalid_argument("fit_dvine_regression: ragged data");

    // PIT upfront; margins are fitted once and never refit per subset
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = clamp_unit(margin_cdf(response_margin, y[i]));
    std::vector<std::vector<double>> u(d, std::vector<double>(n));
    for (std::size_t k = 0; k < d; ++k)
        for (std::size_t i = 0; i < n; ++i)
            u[k][i] = clamp_unit(margin_cdf(covariate_margins[k], x_cols[k][i]));

    DVineFitResult result;
    auto& model = result.model;
    model.response_margin = response_margin;
    model.covariate_margins = covariate_margins;
    model.n_train = n;

    // lmat[p] = F(z_p | z_{p+1..last}) for the current path
    std::vector<std::vector<double>> lmat{v};
    std::vector<bool> used(d, false);
    double cur_cll = 0.0;
    int cur_params = 0;
    double cur_crit = dvine_detail::criterion_value(criterion, 0.0, 0, n);

    while (model.order.size() < d) {
        std::vector<int> pool;
        for (std::size_t k = 0; k < d; ++k)
            if (!used[k]) pool.push_back(static_cast<int>(k));

        std::vector<dvine_detail::CandidateFit> fits(pool.size());
        parallel_for(pool.size(), [&](std::size_t idx) {
            fits[idx] = dvine_detail::evaluate_candidate(lmat, u[pool[idx]], allowed);
        });

        SelectionStepTrace step;
        int best_idx = -1;
        double best_crit = 0.0;
        for (std::size_t idx = 0; idx < pool.size(); ++idx) {
            double cand_cll = cur_cll + fits[idx].edge_ll;
            double cand_crit = dvine_detail::criterion_value(
                criterion, cand_cll, cur_params + fits[idx].total_params, n);
            step.candidates.push_back({pool[idx], cand_cll, cand_crit});
            if (best_idx < 0 || dvine_detail::criterion_improves(criterion, cand_crit,
                                                                 best_crit)) {
                best_idx = static_cast<int>(idx);
                best_crit = cand_crit;
            }
        }

        if (best_idx < 0 ||
            !dvine_detail::criterion_improves(criterion, best_crit, cur_crit)) {
            step.chosen = -1;
            result.trace.steps.push_back(std::move(step));
            result.trace.stop_reason = "no criterion improvement";
            break;
        }

        auto& win = fits[best_idx];
        const int col = pool[best_idx];
        const std::size_t j = lmat.size();
        step.chosen = col;
        result.trace.steps.push_back(std::move(step));

        // graft the fitted edges: span s edge goes to tree s at position j-s
        for (std::size_t s = 1; s <= j; ++s) {
            if (model.trees.size() < s) model.trees.emplace_back();
            model.trees[s - 1].push_back({win.edges[s - 1].copula,
                                          win.edges[s - 1].loglik});
        }

        // extend the suffix conditionals with the new variable
        std::vector<std::vector<double>> lnew(j + 1);
        for (std::size_t p = 0; p < j; ++p) {
            const auto& e = model.trees[j - p - 1][p].cop; // (z_p, z_j)
            const auto& fz = win.rsteps[j - 1 - p]; // F(z_j | z_{p+1..j-1})
            lnew[p].resize(n);
            for (std::size_t i = 0; i < n; ++i)
                lnew[p][i] = hfunc(e, HSide::first_given_second, lmat[p][i], fz[i]);
        }
        lnew[j] = u[col];
        lmat = std::move(lnew);

        used[col] = true;
        model.order.push_back(col);
        cur_cll += win.edge_ll;
        cur_params += win.total_params;
        cur_crit = dvine_detail::criterion_value(criterion, cur_cll, cur_params, n);

        StepStats st;
        st.covariate = col;
        st.edge_loglik = win.edge_ll;
        st.edge_params = win.edge_params;
        st.edge_tau = param_to_tau(win.edges[j - 1].copula);
        st.cll = cur_cll;
        st.cll_aic = -2.0 * cur_cll + 2.0 * cur_params;
        st.cll_bic = -2.0 * cur_cll + std::log(static_cast<double>(n)) * cur_params;
        double stat = 2.0 * win.edge_ll;
        st.p_value = (win.edge_params == 0 || stat <= 0.0)
                         ? 1.0
                         : chi2_sf(stat, win.edge_params);
        model.fit_stats.push_back(st);
    }
    if (result.trace.stop_reason.empty())
        result.trace.stop_reason = "all covariates included";
    model.validate();
    return result;
}

struct LrTestResult {
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
};

// Likelihood-ratio test between nested models differing by one covariate.
inline LrTestResult lr_test(const DVineRegressionModel& smaller,
                            const DVineRegressionModel& larger,
                            const std::vector<double>& y,
                            const std::vector<std::vector<double>>& x_cols) {
    if (larger.order.size() != smaller.order.size() + 1 ||
        !std::equal(smaller.order.begin(), smaller.order.end(), larger.order.begin()))
        throw std::invalid_argument("lr_test: models are not nested by one covariate");
    LrTestResult out;
    double cll_small = smaller.order.empty() ? 0.0 : cll(smaller, y, x_cols);
    double cll_large = cll(larger, y, x_cols);
    out.statistic = 2.0 * (cll_large - cll_small);
    // degrees of freedom: parameters of the newest response edge
    out.df = larger.trees.back()[0].cop.n_params();
    out.p_value = (out.df <= 0 || out.statistic <= 0.0)
                      ? 1.0
                      : chi2_sf(out.statistic, out.df);
    return out;
}

} // namespace tailvine
