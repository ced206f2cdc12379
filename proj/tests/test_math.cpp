#include <doctest.h>

#include <cmath>
#include <vector>

#include "tailvine/math/optimize.hpp"
#include "tailvine/math/quadrature.hpp"
#include "tailvine/math/rng.hpp"
#include "tailvine/math/special.hpp"
#include "tailvine/math/stats.hpp"

using namespace tailvine;

TEST_CASE("normal cdf/quantile round trip") {
    for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-9}) {
        double x = norm_quantile(p);
        CHECK(norm_cdf(x) == doctest::Approx(p).epsilon(1e-12));
    }
    CHECK(norm_cdf(0.0) == doctest::Approx(0.5));
    CHECK(norm_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
}

TEST_CASE("quadrature integrates known functions") {
    CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::exp(-x * x / 2); }, -8.0, 8.0) ==
          doctest::Approx(std::sqrt(2.0 * 3.14159265358979)).epsilon(1e-12));
}

TEST_CASE("brent finds the minimum of a quartic") {
    auto f = [](double x) { return std::pow(x - 0.7, 4) + 2.0; };
    auto r = brent_minimize(f, -3.0, 3.0, 1e-9, 500);
    CHECK(r.converged);
    CHECK(r.x == doctest::Approx(0.7).epsilon(1e-3));
}

TEST_CASE("nelder-mead respects box constraints") {
    auto f = [](const std::vector<double>& p) {
        return (p[0] - 2.0) * (p[0] - 2.0) + (p[1] + 1.0) * (p[1] + 1.0);
    };
    auto r = nelder_mead(f, {0.5, 0.5}, {0.0, 0.0}, {1.0, 1.0}, 1e-10, 500);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-5)); // clamped at the box edge
    CHECK(r.x[1] == doctest::Approx(0.0).epsilon(1e-4));
}

TEST_CASE("kendall tau on exact monotone data") {
    std::vector<double> x{1, 2, 3, 4, 5}, y{2, 4, 6, 8, 10}, z{5, 4, 3, 2, 1};
    CHECK(kendall_tau(x, y) == doctest::Approx(1.0));
    CHECK(kendall_tau(x, z) == doctest::Approx(-1.0));
}

TEST_CASE("kendall tau matches brute force with ties") {
    Rng rng(42);
    std::vector<double> x(200), y(200);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = std::floor(rng.uniform() * 20);
        y[i] = std::floor(rng.uniform() * 20) + 0.3 * x[i];
    }
    // brute-force tau_b with tie correction
    long long conc = 0, disc = 0, tx = 0, ty = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            double s = (x[i] - x[j]) * (y[i] - y[j]);
            if (s > 0) ++conc;
            else if (s < 0) ++disc;
            if (x[i] == x[j]) ++tx;
            if (y[i] == y[j]) ++ty;
        }
    double n0 = 0.5 * x.size() * (x.size() - 1.0);
    double expected = (conc - disc) / std::sqrt((n0 - tx) * (n0 - ty));
    CHECK(kendall_tau(x, y) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("rng is deterministic and roughly uniform") {
    Rng a(7), b(7);
    for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
    Rng c(123);
    double s = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) s += c.uniform();
    CHECK(s / n == doctest::Approx(0.5).epsilon(5e-3));
}

TEST_CASE("logit and expit are inverses") {
    for (double p : {1e-9, 1e-4, 0.25, 0.5, 0.9, 1.0 - 1e-9})
        CHECK(expit(logit(p)) == doctest::Approx(p).epsilon(1e-12));
    CHECK(logit(0.5) == 0.0);
    CHECK_THROWS_AS(logit(0.0), std::domain_error);
    CHECK_THROWS_AS(logit(1.0), std::domain_error);
}

TEST_CASE("debye function sanity") {
    // D1(x) -> 1 as x -> 0+ and decreases toward pi^2/(6x)
    CHECK(debye1(1e-6) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(debye1(50.0) == doctest::Approx(3.14159265358979 * 3.14159265358979 / 6.0 / 50.0)
                              .epsilon(1e-6));
}

TEST_CASE("ks distance of uniform grid is small") {
    std::vector<double> u(1000);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = (i + 0.5) / u.size();
    CHECK(ks_uniform_distance(u) < 0.002);
    CHECK(ks_uniform_pvalue(0.5, 1000) < 1e-10);
}
