#include <doctest.h>

#include <cmath>
#include <vector>

#include "tailvine/risk/risk.hpp"
#include "testutil.hpp"

using namespace tailvine;

namespace {

MarginalModel std_normal() {
    MarginalModel m;
    m.family = MarginFamily::normal;
    m.params = {0.0, 1.0};
    m.norm_const = 1.0;
    return m;
}

BivariateCopula cop(Family f, std::vector<double> p, int rot = 0) {
    BivariateCopula c;
    c.family = f;
    c.rotation = rot;
    c.params = std::move(p);
    return c;
}

DVineRegressionModel two_cov_model() {
    DVineRegressionModel m;
    m.response_margin = std_normal();
    m.covariate_margins = {std_normal(), std_normal()};
    m.order = {0, 1};
    m.trees.resize(2);
    m.trees[0].push_back({cop(Family::gaussian, {0.6}), 0.0});
    m.trees[0].push_back({cop(Family::gaussian, {0.4}), 0.0});
    m.trees[1].push_back({cop(Family::frank, {2.0}), 0.0});
    m.validate();
    return m;
}

} // namespace

TEST_CASE("critical event probability basics") {
    DVineRegressionModel marginal_only;
    marginal_only.response_margin = std_normal();
    CHECK(critical_event_probability(marginal_only, 0.0, {}) == doctest::Approx(0.5));
    CHECK(critical_event_probability(marginal_only, -40.0, {}) ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(critical_event_probability(marginal_only, 40.0, {}) ==
          doctest::Approx(0.0).epsilon(1e-9));

    auto m = two_cov_model();
    std::vector<double> x{0.8, -0.3};
    double med = conditional_quantile(m, 0.5, x);
    CHECK(critical_event_probability(m, med, x) == doctest::Approx(0.5).epsilon(1e-7));

    CHECK_THROWS_AS(critical_event_probability(
                        m, std::numeric_limits<double>::infinity(), x),
                    std::invalid_argument);
}

TEST_CASE("exceedance probability is nonincreasing in the threshold") {
    auto m = two_cov_model();
    Rng rng(88);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> x{norm_quantile(rng.uniform()), norm_quantile(rng.uniform())};
        double prev = 2.0;
        for (int i = 0; i < 50; ++i) {
            double c = -4.0 + 8.0 * i / 49.0;
            double a = critical_event_probability(m, c, x);
            CHECK(a <= prev + 1e-12);
            prev = a;
        }
    }
}

TEST_CASE("identify_risky flags and counts") {
    auto m = two_cov_model();
    auto sim = simulate_dvine(m, 400, 5);
    std::vector<std::vector<double>> cols{sim.x_cols[0], sim.x_cols[1]};

    // thresholds far outside the support
    auto rep_lo = identify_risky(m, cols, 400, -30.0, 1e-3);
    CHECK(rep_lo.n_risky == 400);
    auto rep_hi = identify_risky(m, cols, 400, 30.0, 1e-3);
    CHECK(rep_hi.n_risky == 0);
    CHECK(rep_hi.n_above_floor == 0); // gaussian tail underflows past z=30

    // p_threshold = 1 can never flag anything
    auto rep_one = identify_risky(m, cols, 400, 0.0, 1.0);
    CHECK(rep_one.n_risky == 0);

    auto rep_med = identify_risky(m, cols, 400, 0.0, 0.5);
    // about half the rows sit above their conditional median at c = 0
    CHECK(rep_med.n_risky > 120);
    CHECK(rep_med.n_risky < 280);
    CHECK(rep_med.max_alpha <= 1.0);
    for (const auto& r : rep_med.records)
        if (!r.below_floor)
            CHECK(expit(r.logit_alpha) == doctest::Approx(r.alpha).epsilon(1e-9));
}

TEST_CASE("logit at reporting-scale values") {
    CHECK(logit(0.202) == doctest::Approx(std::log(0.202 / 0.798)).epsilon(1e-12));
    CHECK(logit(0.202) == doctest::Approx(-1.3737).epsilon(1e-3));
    CHECK(logit(expit(-5.20)) == doctest::Approx(-5.20).epsilon(1e-12));
}

TEST_CASE("standardize") {
    auto z = standardize({{1.0, 2.0, 3.0}});
    CHECK(z[0][0] == doctest::Approx(-1.0));
    CHECK(z[0][1] == doctest::Approx(0.0));
    CHECK(z[0][2] == doctest::Approx(1.0));

    Rng rng(3);
    std::vector<double> col(200);
    for (auto& v : col) v = 5.0 + 3.0 * rng.uniform();
    auto zs = standardize({col});
    CHECK(mean(zs[0]) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sample_sd(zs[0]) == doctest::Approx(1.0).epsilon(1e-12));

    // affine invariance up to sign
    std::vector<double> scaled(col.size());
    for (std::size_t i = 0; i < col.size(); ++i) scaled[i] = -2.0 * col[i] + 7.0;
    auto za = standardize({scaled});
    for (std::size_t i = 0; i < col.size(); ++i)
        CHECK(za[0][i] == doctest::Approx(-zs[0][i]).epsilon(1e-9));

    CHECK_THROWS_AS(standardize({{2.0, 2.0, 2.0}}), std::invalid_argument);
}

TEST_CASE("ols ranking recovers planted coefficients") {
    Rng rng(41);
    const std::size_t n = 200;
    std::vector<double> z1(n), z2(n), eta(n);
    for (std::size_t i = 0; i < n; ++i) {
        z1[i] = norm_quantile(rng.uniform());
        z2[i] = norm_quantile(rng.uniform());
    }
    auto zs = standardize({z1, z2});
    for (std::size_t i = 0; i < n; ++i)
        eta[i] = -5.20 - 1.44 * zs[0][i] + 0.5 * zs[1][i] +
                 0.1 * norm_quantile(rng.uniform());
    auto res = ols_rank(eta, zs, {"hws", "other"});
    CHECK(res.estimate[0] == doctest::Approx(-5.20).epsilon(0.02));
    CHECK(res.estimate[1] > -1.48);
    CHECK(res.estimate[1] < -1.40);
    CHECK(res.ranking.front() == 1); // hws dominates
    CHECK(res.adj_r_squared > 0.9);
    CHECK(res.p_value[1] < 1e-10);

    // residual orthogonality to the design
    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i)
        resid[i] = eta[i] - res.estimate[0] - res.estimate[1] * zs[0][i] -
                   res.estimate[2] * zs[1][i];
    for (const auto& col : zs) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += resid[i] * col[i];
        CHECK(std::fabs(dot) < 1e-9 * n);
    }
}

TEST_CASE("ols on pure noise and on exact fits") {
    Rng rng(42);
    const std::size_t n = 300;
    std::vector<double> z1(n), eta(n);
    for (std::size_t i = 0; i < n; ++i) {
        z1[i] = norm_quantile(rng.uniform());
        eta[i] = norm_quantile(rng.uniform());
    }
    auto zs = standardize({z1});
    auto noise = ols_rank(eta, zs);
    CHECK(std::fabs(noise.adj_r_squared) < 0.05);
    CHECK(noise.p_value[1] > 1e-4);

    std::vector<double> exact(n);
    for (std::size_t i = 0; i < n; ++i) exact[i] = 2.0 + 3.0 * zs[0][i];
    auto perfect = ols_rank(exact, zs);
    CHECK(perfect.r_squared == doctest::Approx(1.0).epsilon(1e-10));
    double max_resid = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        max_resid = std::max(max_resid,
                             std::fabs(exact[i] - perfect.estimate[0] -
                                       perfect.estimate[1] * zs[0][i]));
    CHECK(max_resid < 1e-10);

    auto dup = zs;
    dup.push_back(zs[0]);
    CHECK_THROWS_AS(ols_rank(eta, dup), std::domain_error);
}

TEST_CASE("empirical kendall tau") {
    std::vector<double> x{1, 2, 3, 4, 5, 6};
    std::vector<double> y{2, 4, 6, 8, 10, 12};
    CHECK(empirical_kendall_tau(x, y) == doctest::Approx(1.0));
    std::vector<double> yn{12, 10, 8, 6, 4, 2};
    CHECK(empirical_kendall_tau(x, yn) == doctest::Approx(-1.0));

    // th80-lm scale dependence: gaussian with tau 0.46
    double rho = std::sin(1.5707963267948966 * 0.46);
    auto s = simulate_bicop(BivariateCopula{Family::gaussian, 0, {rho}, std::nullopt},
                            100000, 314159);
    double tau = empirical_kendall_tau(s.u, s.v);
    CHECK(tau > 0.45);
    CHECK(tau < 0.47);

    std::vector<double> konst{1, 1, 1};
    CHECK_THROWS_AS(empirical_kendall_tau(konst, konst), std::invalid_argument);
}

TEST_CASE("exceedance stays analytic far below the reporting floor") {
    auto m = two_cov_model();
    std::vector<double> x{0.5, -0.2};
    double prev = 1.0;
    bool seen_below_floor = false;
    for (double c = 0.0; c <= 9.0; c += 0.25) {
        double a = critical_event_probability(m, c, x);
        CHECK(a <= prev);
        CHECK(a > 0.0);
        if (a < 1e-13) seen_below_floor = true;
        prev = a;
    }
    CHECK(seen_below_floor);

    // survival and cdf routes agree where both are well conditioned
    for (double c : {-1.0, 0.0, 1.0, 2.0})
        CHECK(critical_event_probability(m, c, x) ==
              doctest::Approx(1.0 - conditional_cdf(m, c, x)).epsilon(1e-7));
}

TEST_CASE("monte carlo consistency of the analytic probability") {
    auto m = two_cov_model();
    std::vector<double> x{1.2, 0.4};
    auto cond = dvine_detail::covariate_conditionals(
        m, {clamp_unit(norm_cdf(x[0])), clamp_unit(norm_cdf(x[1]))});
    Rng rng(2024);
    for (double c : {0.5, 1.5, 2.5}) {
        double a_analytic = critical_event_probability(m, c, x);
        double vc = clamp_unit(norm_cdf(c));
        const std::size_t N = 200000;
        std::size_t hits = 0;
        for (std::size_t i = 0; i < N; ++i) {
            double v = dvine_detail::cond_quantile_core(m, rng.uniform(), cond);
            if (v > vc) ++hits;
        }
        double a_mc = static_cast<double>(hits) / N;
        double se = std::sqrt(a_analytic * (1.0 - a_analytic) / N);
        CHECK(std::fabs(a_mc - a_analytic) < 3.0 * se + 1e-12);
    }
}
