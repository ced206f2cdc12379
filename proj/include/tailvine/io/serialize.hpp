#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "tailvine/dvine/dvine.hpp"
#include "tailvine/lqr/lqr.hpp"
#include "tailvine/risk/risk.hpp"

namespace tailvine {

using nlohmann::json;

inline json to_json(const BivariateCopula& c) {
    json j;
    j["family"] = family_name(c.family);
    j["rotation"] = c.rotation;
    j["parameters"] = c.params;
    if (c.df) j["df"] = *c.df;
    return j;
}

inline BivariateCopula copula_from_json(const json& j) {
    BivariateCopula c;
    c.family = family_from_name(j.at("family").get<std::string>());
    c.rotation = j.value("rotation", 0);
    c.params = j.at("parameters").get<std::vector<double>>();
    if (j.contains("df")) c.df = j["df"].get<double>();
    c.validate();
    return c;
}

inline json to_json(const MarginalModel& m) {
    json j;
    j["family"] = margin_family_name(m.family);
    j["parameters"] = m.params;
    return j;
}

inline MarginalModel margin_from_json(const json& j) {
    MarginalModel m;
    m.family = margin_family_from_name(j.at("family").get<std::string>());
    m.params = j.at("parameters").get<std::vector<double>>();
    m.validate();
    finalize_margin(m);
    return m;
}

inline json to_json(const DVineRegressionModel& m,
                    const std::vector<std::string>& covariate_names = {},
                    const std::string& response_name = "") {
    json j;
    j["order"] = m.order;
    json trees = json::array();
    for (const auto& level : m.trees) {
        json edges = json::array();
        for (const auto& e : level) {
            json je = to_json(e.cop);
            je["loglik"] = e.loglik;
            edges.push_back(je);
        }
        trees.push_back(edges);
    }
    j["trees"] = trees;
    j["response_margin"] = to_json(m.response_margin);
    json covs = json::array();
    for (const auto& cm : m.covariate_margins) covs.push_back(to_json(cm));
    j["covariate_margins"] = covs;
    json stats = json::array();
    for (const auto& s : m.fit_stats) {
        stats.push_back({{"covariate", s.covariate},
                         {"edge_loglik", s.edge_loglik},
                         {"edge_params", s.edge_params},
                         {"edge_tau", s.edge_tau},
                         {"cll", s.cll},
                         {"cll_aic", s.cll_aic},
                         {"cll_bic", s.cll_bic},
                         {"p_value", s.p_value}});
    }
    j["fit_stats"] = stats;
    j["n_train"] = m.n_train;
    if (!covariate_names.empty()) j["covariate_names"] = covariate_names;
    if (!response_name.empty()) j["response_name"] = response_name;
    return j;
}

inline DVineRegressionModel model_from_json(const json& j) {
    DVineRegressionModel m;
    m.order = j.at("order").get<std::vector<int>>();
    for (const auto& level : j.at("trees")) {
        m.trees.emplace_back();
        for (const auto& je : level)
            m.trees.back().push_back({copula_from_json(je), je.value("loglik", 0.0)});
    }
    m.response_margin = margin_from_json(j.at("response_margin"));
    for (const auto& jc : j.at("covariate_margins"))
        m.covariate_margins.push_back(margin_from_json(jc));
    if (j.contains("fit_stats")) {
        for (const auto& js : j["fit_stats"]) {
            StepStats s;
            s.covariate = js.value("covariate", -1);
            s.edge_loglik = js.value("edge_loglik", 0.0);
            s.edge_params = js.value("edge_params", 0);
            s.edge_tau = js.value("edge_tau", 0.0);
            s.cll = js.value("cll", 0.0);
            s.cll_aic = js.value("cll_aic", 0.0);
            s.cll_bic = js.value("cll_bic", 0.0);
            s.p_value = js.value("p_value", 1.0);
            m.fit_stats.push_back(s);
        }
    }
    m.n_train = j.value("n_train", std::size_t{0});
    m.validate();
    return m;
}

inline json to_json(const RiskReport& rep) {
    json j;
    j["threshold"] = rep.threshold;
    j["p_threshold"] = rep.p_threshold;
    j["floor"] = rep.floor;
    j["n_risky"] = rep.n_risky;
    j["n_above_floor"] = rep.n_above_floor;
    j["max_alpha"] = rep.max_alpha;
    json rows = json::array();
    for (const auto& r : rep.records) {
        json jr;
        jr["row"] = r.row;
        if (r.below_floor) {
            jr["alpha"] = nullptr; // reported as the interval [0, floor)
            jr["below_floor"] = true;
        } else {
            jr["alpha"] = r.alpha;
            jr["below_floor"] = false;
            jr["logit"] = r.logit_alpha;
        }
        jr["risky"] = r.risky;
        rows.push_back(jr);
    }
    j["records"] = rows;
    return j;
}

inline RiskReport risk_report_from_json(const json& j) {
    RiskReport rep;
    rep.threshold = j.at("threshold").get<double>();
    rep.p_threshold = j.at("p_threshold").get<double>();
    rep.floor = j.value("floor", 1e-13);
    rep.n_risky = j.value("n_risky", std::size_t{0});
    rep.n_above_floor = j.value("n_above_floor", std::size_t{0});
    rep.max_alpha = j.value("max_alpha", 0.0);
    for (const auto& jr : j.at("records")) {
        RiskRecord r;
        r.row = jr.at("row").get<std::size_t>();
        r.below_floor = jr.value("below_floor", false);
        r.alpha = r.below_floor ? 0.0 : jr.at("alpha").get<double>();
        r.logit_alpha = r.below_floor ? -std::numeric_limits<double>::infinity()
                                      : jr.value("logit", 0.0);
        r.risky = jr.value("risky", false);
        rep.records.push_back(r);
    }
    return rep;
}

// CSV layout: row id, alpha (empty when below the floor), logit, risky flag
inline void write_risk_csv(const std::string& path, const RiskReport& rep) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "row,alpha,below_floor,logit,risky\n";
    char buf[40];
    for (const auto& r : rep.records) {
        out << r.row << ",";
        if (r.below_floor) {
            out << ",1,,";
        } else {
            std::snprintf(buf, sizeof buf, "%.17g", r.alpha);
            out << buf << ",0,";
            std::snprintf(buf, sizeof buf, "%.17g", r.logit_alpha);
            out << buf << ",";
        }
        out << (r.risky ? 1 : 0) << "\n";
    }
}

inline std::string format_ranking_table(const RankingResult& r) {
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof line, "%-14s %10s %12s %9s %10s\n", "", "Estimate",
                  "Std. Error", "t value", "Pr(>|t|)");
    os << line;
    for (std::size_t j = 0; j < r.names.size(); ++j) {
        std::snprintf(line, sizeof line, "%-14s %10.2f %12.2f %9.2f %10.2f\n",
                      r.names[j].c_str(), r.estimate[j], r.std_error[j], r.t_value[j],
                      r.p_value[j]);
        os << line;
    }
    std::snprintf(line, sizeof line, "Adjusted R-squared: %.2f\n", r.adj_r_squared);
    os << line;
    os << "Ranking by |estimate|:";
    for (std::size_t idx : r.ranking) os << " " << r.names[idx];
    os << "\n";
    return os.str();
}

inline json to_json(const RankingResult& r) {
    json j;
    j["names"] = r.names;
    j["estimate"] = r.estimate;
    j["std_error"] = r.std_error;
    j["t_value"] = r.t_value;
    j["p_value"] = r.p_value;
    j["adj_r_squared"] = r.adj_r_squared;
    j["r_squared"] = r.r_squared;
    j["ranking"] = r.ranking;
    return j;
}

inline const char* significance_stars(double p) {
    if (p < 0.01) return "***";
    if (p < 0.05) return "**";
    if (p < 0.1) return "*";
    return "";
}

// lqr coefficient table with significance stars (*p<0.1 **p<0.05 ***p<0.01)
inline std::string format_lqr_table(const QuantileRegressionFit& fit,
                                    const std::vector<std::string>& names) {
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof line, "lqr coefficients at alpha = %.4g\n", fit.alpha);
    os << line;
    std::snprintf(line, sizeof line, "%-14s %12s %12s %5s\n", "", "Value",
                  "Std. Error", "");
    os << line;
    for (std::size_t j = 0; j < fit.beta.size(); ++j) {
        std::string nm = j == 0 ? "(Intercept)"
                                : (j - 1 < names.size() ? names[j - 1]
                                                        : "x" + std::to_string(j - 1));
        double se = j < fit.std_error.size() ? fit.std_error[j] : 0.0;
        std::string stars;
        if (se > 0.0) {
            double t = fit.beta[j] / se;
            double p = 2.0 * norm_cdf(-std::fabs(t));
            stars = significance_stars(p);
        }
        std::snprintf(line, sizeof line, "%-14s %12.2f %12.2f %5s\n", nm.c_str(),
                      fit.beta[j], se, stars.c_str());
        os << line;
    }
    os << "Note: *p<0.1; **p<0.05; ***p<0.01\n";
    return os.str();
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

inline void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

} // namespace tailvine
