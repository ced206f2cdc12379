#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "tailvine/dvine/dvine.hpp"

namespace tailvine {

// Selection summary, one row per added covariate: name, column index, its
// conditioning set, the fitted response-edge family with parameters, tau,
// per-edge ll / ll_aic / ll_bic and the step's likelihood-ratio p-value.
inline std::string format_dvine_summary(const DVineRegressionModel& model,
                                        const std::vector<std::string>& cov_names = {}) {
    std::ostringstream os;
    char line[240];
    std::snprintf(line, sizeof line, "%-8s %4s %-20s %-9s %-16s %7s %9s %9s %9s %8s\n",
                  "name", "k_j", "conditioning", "family", "parameters", "tau", "ll",
                  "ll_aic", "ll_bic", "p_value");
    os << line;
    const double logn = std::log(static_cast<double>(
        model.n_train > 0 ? model.n_train : 1));
    for (std::size_t step = 0; step < model.fit_stats.size(); ++step) {
        const auto& s = model.fit_stats[step];
        const auto& edge = model.trees[step][0].cop;
        std::string name = static_cast<std::size_t>(s.covariate) < cov_names.size()
                               ? cov_names[s.covariate]
                               : "x" + std::to_string(s.covariate);
        std::string conditioning;
        for (std::size_t p = 0; p < step; ++p) {
            if (p) conditioning += ", ";
            int prev = model.order[step - 1 - p];
            conditioning += static_cast<std::size_t>(prev) < cov_names.size()
                                ? cov_names[prev]
                                : "x" + std::to_string(prev);
        }
        if (conditioning.empty()) conditioning = "-";
        std::string fam = family_name(edge.family);
        if (edge.rotation != 0) fam += "@" + std::to_string(edge.rotation);
        std::string pars;
        char pbuf[32];
        for (std::size_t k = 0; k < edge.params.size(); ++k) {
            std::snprintf(pbuf, sizeof pbuf, "%s%.2f", k ? ", " : "", edge.params[k]);
            pars += pbuf;
        }
        if (edge.df) {
            std::snprintf(pbuf, sizeof pbuf, "%s%.2f", pars.empty() ? "" : ", ",
                          *edge.df);
            pars += pbuf;
        }
        double edge_aic = -2.0 * s.edge_loglik + 2.0 * s.edge_params;
        double edge_bic = -2.0 * s.edge_loglik + logn * s.edge_params;
        std::string pval = s.p_value < 0.005 ? "< 0.00" : "";
        if (pval.empty()) {
            std::snprintf(pbuf, sizeof pbuf, "%.2f", s.p_value);
            pval = pbuf;
        }
        std::snprintf(line, sizeof line,
                      "%-8s %4d %-20s %-9s %-16s %7.2f %9.2f %9.2f %9.2f %8s\n",
                      name.c_str(), s.covariate, conditioning.c_str(), fam.c_str(),
                      pars.c_str(), s.edge_tau, s.edge_loglik, edge_aic, edge_bic,
                      pval.c_str());
        os << line;
    }
    return os.str();
}

} // namespace tailvine
