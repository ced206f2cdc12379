#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tailvine/margins/margins.hpp"
#include "tailvine/margins/mixture.hpp"
#include "tailvine/math/stats.hpp"

namespace tailvine {

// BIC model choice among candidate families; the mixture candidate scans
// S in {2,3,4} with 3S-1 effective parameters.
inline MarginalModel select_margin(std::span<const double> data,
                                   const std::vector<MarginFamily>& candidates) {
    if (candidates.empty())
        throw std::invalid_argument("select_margin: no candidate families");
    const double logn = std::log(static_cast<double>(data.size()));

    bool have = false;
    MarginalModel best;
    double best_bic = 0.0;
    std::string failures;

    auto consider = [&](MarginalModel m) {
        double bic = -2.0 * m.loglik + logn * m.n_free_params();
        if (!have || bic < best_bic) {
            best = std::move(m);
            best_bic = bic;
            have = true;
        }
    };

    for (MarginFamily f : candidates) {
        try {
            if (f == MarginFamily::normal_mixture) {
                for (int S : {2, 3, 4}) consider(fit_mixture_normal(data, S));
            } else {
                consider(fit_parametric(data, f));
            }
        } catch (const std::exception& e) {
            failures += std::string(margin_family_name(f)) + ": " + e.what() + "; ";
        }
    }
    if (!have)
        throw std::runtime_error("select_margin: all candidates failed (" + failures + ")");
    return best;
}

struct PitResult {
    std::vector<std::vector<double>> columns;
    std::vector<double> ks_distance;
    std::vector<double> ks_pvalue;
};

// probability integral transform of each column through its fitted margin
inline PitResult pit_transform(const std::vector<std::vector<double>>& data,
                               const std::vector<MarginalModel>& margins) {
    if (data.size() != margins.size())
        throw std::invalid_argument("pit_transform: one margin per column required");
    PitResult out;
    out.columns.resize(data.size());
    for (std::size_t j = 0; j < data.size(); ++j) {
        const auto& col = data[j];
        if (col.size() < 2 || sample_sd(col) == 0.0)
            throw std::invalid_argument("pit_transform: column " + std::to_string(j) +
                                        " has zero variance");
        auto& u = out.columns[j];
        u.resize(col.size());
        for (std::size_t i = 0; i < col.size(); ++i)
            u[i] = clamp_unit(margin_cdf(margins[j], col[i]));
        double d = ks_uniform_distance(u);
        out.ks_distance.push_back(d);
        out.ks_pvalue.push_back(ks_uniform_pvalue(d, u.size()));
    }
    return out;
}

} // namespace tailvine
