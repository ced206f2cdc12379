#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tailvine/bicop/fit.hpp"
#include "tailvine/dvine/fit.hpp"
#include "tailvine/io/csv.hpp"
#include "tailvine/margins/margins.hpp"

namespace tailvine {

// Run configuration shared by the CLI commands. Readable from a flat
// key = value file (lists comma separated, '#' comments) or from JSON.
struct RunConfig {
    std::string response = "th80";
    std::vector<std::string> covariates = {"hws", "temp", "refAP", "asd", "trd",
                                           "tsd", "lm",  "tbs",  "bd",  "td", "ea"};
    // margin candidates per column; "*" is the fallback entry
    std::map<std::string, std::vector<MarginFamily>> margin_candidates;
    std::vector<std::string> copula_families = {"indep", "gaussian", "t",    "clayton",
                                                "gumbel", "frank",   "joe",  "bb1",
                                                "bb8"};
    std::string criterion = "cll_aic";
    std::vector<double> thresholds = {2200.0, 2400.0, 2500.0};
    double p_threshold = 1e-3;
    double floor = 1e-13;
    std::uint64_t seed = 1;
    bool jitter_ties = false;
    bool ignore_discrete = false; // default: reject non-numeric columns
    bool standardize_full_sample = false;
    std::string truth_model; // model json used by the simulate command

    std::vector<MarginFamily> candidates_for(const std::string& column) const {
        auto it = margin_candidates.find(column);
        if (it != margin_candidates.end()) return it->second;
        it = margin_candidates.find("*");
        if (it != margin_candidates.end()) return it->second;
        return {MarginFamily::normal,       MarginFamily::log_normal,
                MarginFamily::skew_normal,  MarginFamily::skew_student_t,
                MarginFamily::gev,          MarginFamily::gamma,
                MarginFamily::normal_mixture};
    }

    std::vector<CatalogEntry> catalog() const {
        std::vector<CatalogEntry> cat;
        for (const auto& name : copula_families) {
            Family f = family_from_name(name);
            if (family_rotatable(f))
                for (int rot : {0, 90, 180, 270}) cat.push_back({f, rot});
            else
                cat.push_back({f, 0});
        }
        return cat;
    }

    SelectionCriterion selection_criterion() const {
        return criterion_from_name(criterion);
    }
};

namespace io_detail {

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    while (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

inline std::vector<MarginFamily> parse_margin_list(const std::string& value) {
    std::vector<MarginFamily> fams;
    for (const auto& name : split_list(value))
        fams.push_back(margin_family_from_name(name));
    return fams;
}

} // namespace io_detail

inline void apply_config_entry(RunConfig& cfg, const std::string& key,
                               const std::string& value) {
    using io_detail::split_list;
    if (key == "response") cfg.response = value;
    else if (key == "covariates") cfg.covariates = split_list(value);
    else if (key == "copulas" || key == "copula_families")
        cfg.copula_families = split_list(value);
    else if (key == "criterion") cfg.criterion = value;
    else if (key == "thresholds") {
        cfg.thresholds.clear();
        for (const auto& t : split_list(value)) cfg.thresholds.push_back(std::stod(t));
    } else if (key == "p_threshold") cfg.p_threshold = std::stod(value);
    else if (key == "floor") cfg.floor = std::stod(value);
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "jitter_ties") cfg.jitter_ties = value == "true" || value == "1";
    else if (key == "ignore_discrete")
        cfg.ignore_discrete = value == "true" || value == "1";
    else if (key == "standardize_full_sample")
        cfg.standardize_full_sample = value == "true" || value == "1";
    else if (key == "truth_model") cfg.truth_model = value;
    else if (key.rfind("margins.", 0) == 0)
        cfg.margin_candidates[key.substr(8)] = io_detail::parse_margin_list(value);
    else
        throw std::invalid_argument("config: unknown key '" + key + "'");
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    RunConfig cfg;

    if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
        nlohmann::json j;
        in >> j;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (it.key() == "margins") {
                for (auto m = it->begin(); m != it->end(); ++m) {
                    std::vector<MarginFamily> fams;
                    for (const auto& name : *m)
                        fams.push_back(margin_family_from_name(name.get<std::string>()));
                    cfg.margin_candidates[m.key()] = fams;
                }
                continue;
            }
            std::string value;
            if (it->is_string()) value = it->get<std::string>();
            else if (it->is_array()) {
                for (const auto& e : *it) {
                    if (!value.empty()) value += ",";
                    value += e.is_string() ? e.get<std::string>()
                                           : nlohmann::to_string(e);
                }
            } else value = nlohmann::to_string(*it);
            apply_config_entry(cfg, it.key(), value);
        }
        return cfg;
    }

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = io_detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key = value");
        apply_config_entry(cfg, io_detail::trim(line.substr(0, eq)),
                           io_detail::trim(line.substr(eq + 1)));
    }
    return cfg;
}

} // namespace tailvine
