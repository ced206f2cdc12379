#include <doctest.h>

#include <cmath>
#include <vector>

#include "tailvine/lqr/lqr.hpp"
#include "tailvine/math/special.hpp"

using namespace tailvine;

namespace {

struct Sim {
    std::vector<double> y;
    std::vector<std::vector<double>> x;
};

// y = 1 + 2x + noise(x) with optional heteroskedastic scale
Sim simulate_linear(std::size_t n, std::uint64_t seed, double het = 0.0) {
    Rng rng(seed);
    Sim s;
    s.y.resize(n);
    s.x.assign(1, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        double x = 3.0 * rng.uniform();
        double scale = 1.0 + het * x;
        s.x[0][i] = x;
        s.y[i] = 1.0 + 2.0 * x + scale * norm_quantile(rng.uniform());
    }
    return s;
}

} // namespace

TEST_CASE("median regression recovers the line") {
    auto s = simulate_linear(5000, 21);
    auto fit = fit_lqr(s.y, s.x, 0.5);
    CHECK(fit.beta[0] == doctest::Approx(1.0).epsilon(0.1));
    CHECK(fit.beta[1] == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("upper quantile shifts the intercept by the noise quantile") {
    auto s = simulate_linear(5000, 22);
    auto fit = fit_lqr(s.y, s.x, 0.9);
    CHECK(std::fabs(fit.beta[0] - (1.0 + norm_quantile(0.9))) < 0.1);
    CHECK(std::fabs(fit.beta[1] - 2.0) < 0.1);
}

TEST_CASE("check loss is locally optimal") {
    auto s = simulate_linear(1500, 23);
    for (double alpha : {0.25, 0.5, 0.9}) {
        auto fit = fit_lqr(s.y, s.x, alpha);
        std::vector<double> r;
        auto loss_at = [&](const std::vector<double>& beta) {
            std::vector<double> res(s.y.size());
            for (std::size_t i = 0; i < s.y.size(); ++i)
                res[i] = s.y[i] - beta[0] - beta[1] * s.x[0][i];
            return check_loss(alpha, res);
        };
        double base = loss_at(fit.beta);
        for (std::size_t j = 0; j < fit.beta.size(); ++j) {
            for (double d : {-1e-3, 1e-3}) {
                auto b = fit.beta;
                b[j] += d;
                CHECK(loss_at(b) >= base - 1e-12);
            }
        }
    }
}

TEST_CASE("subgradient condition: residual sign fraction near alpha") {
    auto s = simulate_linear(2000, 24);
    for (double alpha : {0.1, 0.5, 0.8}) {
        auto fit = fit_lqr(s.y, s.x, alpha);
        std::size_t below = 0;
        for (std::size_t i = 0; i < s.y.size(); ++i)
            if (s.y[i] - fit.beta[0] - fit.beta[1] * s.x[0][i] < 0.0) ++below;
        double frac = static_cast<double>(below) / s.y.size();
        CHECK(std::fabs(frac - alpha) <= (1.0 + 2.0) / s.y.size() + 1e-12);
    }
}

TEST_CASE("prediction is affine") {
    QuantileRegressionFit f;
    f.alpha = 0.5;
    f.beta = {1.0, 2.0};
    CHECK(predict_quantile_lqr(f, std::vector<double>{3.0}) == doctest::Approx(7.0));
    QuantileRegressionFit c;
    c.beta = {4.2};
    CHECK(predict_quantile_lqr(c, std::vector<double>{}) == doctest::Approx(4.2));
    // linearity: f(x1 + x2) = f(x1) + f(x2) - intercept
    double x1 = 0.7, x2 = -1.9;
    CHECK(predict_quantile_lqr(f, std::vector<double>{x1 + x2}) ==
          doctest::Approx(predict_quantile_lqr(f, std::vector<double>{x1}) +
                          predict_quantile_lqr(f, std::vector<double>{x2}) - f.beta[0]));
    CHECK_THROWS_AS(predict_quantile_lqr(f, std::vector<double>{1.0, 2.0}),
                    std::invalid_argument);
}

TEST_CASE("bootstrap standard errors are deterministic and plausible") {
    auto s = simulate_linear(400, 25);
    auto a = fit_lqr(s.y, s.x, 0.5, 100, 99);
    auto b = fit_lqr(s.y, s.x, 0.5, 100, 99);
    CHECK(a.std_error == b.std_error);
    CHECK(a.std_error[1] > 0.01);
    CHECK(a.std_error[1] < 0.5);
}

TEST_CASE("rank-deficient design is reported") {
    auto s = simulate_linear(200, 26);
    auto dup = s.x;
    dup.push_back(s.x[0]); // perfectly collinear column
    CHECK_THROWS_AS(fit_lqr(s.y, dup, 0.5), std::domain_error);
}

TEST_CASE("bisection recovers a planted level on a smooth synthetic grid") {
    auto fitter = [](double alpha) {
        QuantileRegressionFit f;
        f.alpha = alpha;
        f.beta = {norm_quantile(alpha), 2.0};
        return f;
    };
    auto grid = QuantileGrid::synthetic(fitter, {0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99});
    std::vector<double> x{1.5};
    double c = predict_quantile_lqr(fitter(0.3), x);
    auto res = invert_lqr_bisection(grid, c, x);
    REQUIRE(res.status == InversionStatus::found);
    CHECK(res.alpha == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(std::fabs(res.predicted - c) < 1e-4);
}

TEST_CASE("bisection reports not-found beyond the grid span") {
    auto fitter = [](double alpha) {
        QuantileRegressionFit f;
        f.alpha = alpha;
        f.beta = {norm_quantile(alpha), 2.0};
        return f;
    };
    auto grid = QuantileGrid::synthetic(fitter, {0.01, 0.5, 0.999});
    std::vector<double> x{0.0};
    double c = predict_quantile_lqr(fitter(0.999), x) + 10.0;
    auto res = invert_lqr_bisection(grid, c, x);
    CHECK(res.status == InversionStatus::not_found);
    CHECK(!res.diagnostic.empty());
}

TEST_CASE("bisection flags non-unique levels on a crossing grid") {
    // predictions 1, 3, 2 across levels: a target of 2.5 is bracketed twice
    auto fitter = [](double alpha) {
        QuantileRegressionFit f;
        f.alpha = alpha;
        f.beta = {alpha < 0.25 ? 1.0 : alpha < 0.75 ? 3.0 : 2.0, 0.0};
        return f;
    };
    auto grid = QuantileGrid::synthetic(fitter, {0.1, 0.5, 0.9});
    auto res = invert_lqr_bisection(grid, 2.5, std::vector<double>{0.0});
    CHECK(res.status == InversionStatus::multiple);
    CHECK(res.diagnostic.find("crossing") != std::string::npos);
}

TEST_CASE("parallel lines never cross") {
    auto fitter = [](double alpha) {
        QuantileRegressionFit f;
        f.alpha = alpha;
        f.beta = {norm_quantile(alpha), 1.0};
        return f;
    };
    auto grid = QuantileGrid::synthetic(fitter, {0.1, 0.5, 0.9});
    std::vector<std::vector<double>> pts{{-5.0}, {0.0}, {5.0}};
    CHECK(detect_quantile_crossing(grid, pts).crossings.empty());
}

TEST_CASE("constructed slope flip crosses beyond the intersection") {
    auto fitter = [](double alpha) {
        QuantileRegressionFit f;
        f.alpha = alpha;
        f.beta = {0.0, alpha < 0.5 ? 1.0 : -1.0};
        return f;
    };
    auto grid = QuantileGrid::synthetic(fitter, {0.1, 0.9});
    auto rep = detect_quantile_crossing(grid, {{2.0}});
    REQUIRE(rep.crossings.size() == 1);
    CHECK(rep.crossings[0].alpha_low == doctest::Approx(0.1));
    CHECK(detect_quantile_crossing(grid, {{-2.0}}).crossings.empty());
}

TEST_CASE("heteroskedastic data produces crossings at extrapolated points") {
    auto s = simulate_linear(800, 27, 5.0);
    auto grid = QuantileGrid::from_data(s.y, s.x, {0.01, 0.05, 0.1, 0.2});
    auto rep = detect_quantile_crossing(grid, {{-2.0}, {8.0}});
    CHECK(!rep.crossings.empty());
}
