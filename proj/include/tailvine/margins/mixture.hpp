#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "tailvine/margins/margins.hpp"

namespace tailvine {

struct EmTrace {
    std::vector<double> loglik_path; // observed-data log-likelihood per iteration
    int iterations = 0;
    int restarts = 0;
    bool converged = false;
};

// EM for a univariate S-component normal mixture. Initial means come from an
// S-block quantile split of the sorted data, which keeps the fit
// deterministic. A degenerate component triggers a restart with shifted
// block boundaries, at most 5 times.
inline MarginalModel fit_mixture_normal(std::span<const double> data, int S,
                                        EmTrace* trace = nullptr) {
    const std::size_t n = data.size();
    if (S < 1) throw std::invalid_argument("fit_mixture_normal: S must be >= 1");
    if (n < static_cast<std::size_t>(10 * S))
        throw std::invalid_argument("fit_mixture_normal: need at least 10*S observations");

    const double overall_sd = sample_sd(data);
    if (!(overall_sd > 0.0))
        throw std::domain_error("fit_mixture_normal: zero-variance data");
    const double sigma_floor = 1e-8 * overall_sd;

    std::vector<double> sorted(data.begin(), data.end());
    std::sort(sorted.begin(), sorted.end());

    EmTrace local;
    EmTrace& tr = trace ? *trace : local;

    for (int attempt = 0; attempt <= 5; ++attempt) {
        tr.restarts = attempt;
        tr.loglik_path.clear();

        // block split, shifted by a fraction of a block on restarts
        std::vector<double> mu(S), sigma(S), w(S, 1.0 / S);
        double shift = attempt / 6.0;
        for (int s = 0; s < S; ++s) {
            std::size_t a = static_cast<std::size_t>((s + shift) / (S + shift) * n);
            std::size_t b = static_cast<std::size_t>((s + 1 + shift) / (S + shift) * n);
            b = std::min(b, n);
            if (b <= a + 1) { a = s * n / S; b = std::max(a + 2, (s + 1) * n / (std::size_t)S); b = std::min(b, n); }
            double bm = 0.0;
            for (std::size_t i = a; i < b; ++i) bm += sorted[i];
            bm /= (b - a);
            double bs = 0.0;
            for (std::size_t i = a; i < b; ++i) bs += (sorted[i] - bm) * (sorted[i] - bm);
            bs = std::sqrt(bs / std::max<std::size_t>(1, b - a - 1));
            mu[s] = bm;
            sigma[s] = std::max(bs, 0.05 * overall_sd);
        }

        std::vector<double> resp(n * S);
        double prev_ll = -std::numeric_limits<double>::infinity();
        bool degenerate = false;
        int iter = 0;

        for (; iter < 500; ++iter) {
            // E-step in log space
            double ll = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double mx = -std::numeric_limits<double>::infinity();
                for (int s = 0; s < S; ++s) {
                    double z = (data[i] - mu[s]) / sigma[s];
                    double lp = std::log(w[s]) - std::log(sigma[s]) + norm_log_pdf(z);
                    resp[i * S + s] = lp;
                    mx = std::max(mx, lp);
                }
                double sum = 0.0;
                for (int s = 0; s < S; ++s) sum += std::exp(resp[i * S + s] - mx);
                double lse = mx + std::log(sum);
                ll += lse;
                for (int s = 0; s < S; ++s)
                    resp[i * S + s] = std::exp(resp[i * S + s] - lse);
            }

            // the observed-data log-likelihood must never decrease
            if (ll < prev_ll - 1e-9 * (1.0 + std::fabs(prev_ll)))
                throw std::logic_error("fit_mixture_normal: log-likelihood decreased");
            tr.loglik_path.push_back(ll);
            bool done = std::fabs(ll - prev_ll) < 1e-8;
            prev_ll = ll;

            // M-step
            for (int s = 0; s < S; ++s) {
                double ns = 0.0, ms = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    ns += resp[i * S + s];
                    ms += resp[i * S + s] * data[i];
                }
                ms /= ns;
                double vs = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    vs += resp[i * S + s] * (data[i] - ms) * (data[i] - ms);
                vs /= ns;
                mu[s] = ms;
                sigma[s] = std::sqrt(vs);
                w[s] = ns / n;
            }
            double wsum = std::accumulate(w.begin(), w.end(), 0.0);
            for (auto& x : w) x /= wsum;

            for (int s = 0; s < S; ++s)
                if (!(sigma[s] > sigma_floor)) degenerate = true;
            if (degenerate) break;
            if (done) {
                tr.converged = true;
                break;
            }
        }
        tr.iterations = iter;

        if (!degenerate) {
            // order components by mean for a canonical parameter layout
            std::vector<int> idx(S);
            std::iota(idx.begin(), idx.end(), 0);
            std::sort(idx.begin(), idx.end(), [&](int a, int b) { return mu[a] < mu[b]; });
            MarginalModel out;
            out.family = MarginFamily::normal_mixture;
            out.params.resize(3 * S);
            for (int s = 0; s < S; ++s) {
                out.params[s] = mu[idx[s]];
                out.params[S + s] = sigma[idx[s]];
                out.params[2 * S + s] = w[idx[s]];
            }
            double wsum = 0.0;
            for (int s = 0; s < S - 1; ++s) wsum += out.params[2 * S + s];
            out.params[3 * S - 1] = 1.0 - wsum;
            out.norm_const = 1.0;
            out.loglik = prev_ll;
            return out;
        }
    }
    throw std::runtime_error(
        "fit_mixture_normal: degenerate component after 5 restarts");
}

} // namespace tailvine
