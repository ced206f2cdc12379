#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "tailvine/tailvine.hpp"

using namespace tailvine;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("io_tmp_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

MarginalModel margin(MarginFamily f, std::vector<double> p) {
    MarginalModel m;
    m.family = f;
    m.params = std::move(p);
    finalize_margin(m);
    return m;
}

} // namespace

TEST_CASE("copula json round trip is exact") {
    BivariateCopula c;
    c.family = Family::bb8;
    c.rotation = 270;
    c.params = {3.6200000000000001, 0.84123456789012345};
    json j = to_json(c);
    auto back = copula_from_json(j);
    CHECK(back.family == c.family);
    CHECK(back.rotation == c.rotation);
    CHECK(back.params[0] == c.params[0]); // bitwise equality after round trip
    CHECK(back.params[1] == c.params[1]);

    BivariateCopula t;
    t.family = Family::student_t;
    t.params = {0.6612345678901234};
    t.df = 6.523456789012345;
    auto back_t = copula_from_json(json::parse(to_json(t).dump()));
    CHECK(*back_t.df == *t.df);
    CHECK(back_t.params[0] == t.params[0]);
}

TEST_CASE("margin json round trip") {
    auto m = margin(MarginFamily::normal_mixture,
                    {10.7978, 18.3855, 4.3706, 2.8982, 0.282, 0.718});
    auto back = margin_from_json(json::parse(to_json(m).dump()));
    CHECK(back.family == m.family);
    CHECK(back.params == m.params);
    // quadrature normalization is rebuilt on load
    auto sk = margin(MarginFamily::skew_normal, {0.3789, 1.8669, 0.6545});
    auto back_sk = margin_from_json(to_json(sk));
    CHECK(back_sk.norm_const == doctest::Approx(sk.norm_const).epsilon(1e-14));
}

TEST_CASE("model json round trip preserves predictions") {
    DVineRegressionModel m;
    m.response_margin = margin(MarginFamily::normal, {0.0, 1.0});
    m.covariate_margins = {margin(MarginFamily::normal, {0.0, 1.0}),
                           margin(MarginFamily::gamma, {3.0, 1.0})};
    m.order = {0, 1};
    m.trees.resize(2);
    BivariateCopula e1{Family::clayton, 0, {1.7}, std::nullopt};
    BivariateCopula e2{Family::gaussian, 0, {0.35}, std::nullopt};
    BivariateCopula e3{Family::frank, 0, {2.2}, std::nullopt};
    m.trees[0] = {{e1, 12.0}, {e2, 3.0}};
    m.trees[1] = {{e3, 1.5}};
    m.n_train = 500;
    StepStats st;
    st.covariate = 0;
    st.edge_loglik = 12.0;
    st.edge_params = 1;
    st.cll = 12.0;
    m.fit_stats = {st};

    auto back = model_from_json(json::parse(
        to_json(m, {"a", "b"}, "y").dump()));
    for (double y : {-1.0, 0.3, 2.0})
        for (double x1 : {-0.5, 1.0})
            for (double x2 : {0.5, 3.0}) {
                CHECK(conditional_cdf(back, y, {x1, x2}) ==
                      conditional_cdf(m, y, {x1, x2}));
                CHECK(critical_event_probability(back, y, {x1, x2}) ==
                      critical_event_probability(m, y, {x1, x2}));
            }
    CHECK(back.fit_stats.size() == 1);
    CHECK(back.n_train == 500);
}

TEST_CASE("risk report serialization") {
    RiskReport rep;
    rep.threshold = 2500.0;
    rep.p_threshold = 1e-3;
    rep.floor = 1e-13;
    rep.records = {{0, 0.202, false, logit(0.202), true},
                   {1, 0.0, true, -std::numeric_limits<double>::infinity(), false},
                   {2, 5e-4, false, logit(5e-4), false}};
    rep.n_risky = 1;
    rep.n_above_floor = 2;
    rep.max_alpha = 0.202;

    auto back = risk_report_from_json(json::parse(to_json(rep).dump()));
    CHECK(back.records.size() == 3);
    CHECK(back.records[0].alpha == rep.records[0].alpha);
    CHECK(back.records[1].below_floor);
    CHECK(back.n_risky == 1);

    TempFile f("risk.csv");
    write_risk_csv(f.path, rep);
    std::ifstream in(f.path);
    std::string header, row0, row1;
    std::getline(in, header);
    std::getline(in, row0);
    std::getline(in, row1);
    CHECK(header == "row,alpha,below_floor,logit,risky");
    CHECK(row0.find("0.202") != std::string::npos);
    CHECK(row1 == "1,,1,,0"); // below-floor rows carry no point estimate
}

TEST_CASE("csv round trip and schema errors") {
    TempFile f("data.csv");
    write_csv(f.path, {"a", "b"}, {{1.5, -2.25e-7}, {3.0, 4.125}});
    auto t = read_csv(f.path);
    CHECK(t.names == std::vector<std::string>{"a", "b"});
    CHECK(t.cols[0][1] == -2.25e-7);
    CHECK(t.n_rows() == 2);

    {
        std::ofstream bad(f.path);
        bad << "a,b\n1.0\n";
    }
    CHECK_THROWS(read_csv(f.path));

    {
        std::ofstream mixed(f.path);
        mixed << "a,cfg\n1.0,CONF30\n2.0,CONF30\n";
    }
    CHECK_THROWS(read_csv(f.path)); // discrete column rejected by default
    auto dropped = read_csv(f.path, true);
    CHECK(dropped.rejected == std::vector<std::string>{"cfg"});
    CHECK(dropped.names == std::vector<std::string>{"a"});
}

TEST_CASE("config parsing: flat file") {
    TempFile f("run.cfg");
    {
        std::ofstream out(f.path);
        out << "# sample configuration\n"
            << "response = dist\n"
            << "covariates = w1, w2, w3\n"
            << "copulas = gaussian, clayton, indep\n"
            << "criterion = cll_bic\n"
            << "thresholds = 100, 200\n"
            << "p_threshold = 0.01\n"
            << "seed = 42\n"
            << "margins.dist = normal, gamma\n"
            << "margins.* = normal\n";
    }
    auto cfg = load_config(f.path);
    CHECK(cfg.response == "dist");
    CHECK(cfg.covariates == std::vector<std::string>{"w1", "w2", "w3"});
    CHECK(cfg.thresholds == std::vector<double>{100.0, 200.0});
    CHECK(cfg.p_threshold == 0.01);
    CHECK(cfg.seed == 42);
    CHECK(cfg.selection_criterion() == SelectionCriterion::cll_bic);
    CHECK(cfg.candidates_for("dist") ==
          std::vector<MarginFamily>{MarginFamily::normal, MarginFamily::gamma});
    CHECK(cfg.candidates_for("w1") == std::vector<MarginFamily>{MarginFamily::normal});
    // clayton expands to its rotations, gaussian and indep stay unrotated
    CHECK(cfg.catalog().size() == 1 + 4 + 1);

    {
        std::ofstream out(f.path);
        out << "nonsense = 1\n";
    }
    CHECK_THROWS_AS(load_config(f.path), std::invalid_argument);
}

TEST_CASE("config parsing: json file") {
    TempFile f("run.json");
    {
        std::ofstream out(f.path);
        out << R"({
  "response": "dist",
  "covariates": ["w1", "w2"],
  "thresholds": [150],
  "seed": 9,
  "margins": {"dist": ["normal"], "*": ["normal", "gamma"]}
})";
    }
    auto cfg = load_config(f.path);
    CHECK(cfg.response == "dist");
    CHECK(cfg.covariates.size() == 2);
    CHECK(cfg.thresholds == std::vector<double>{150.0});
    CHECK(cfg.seed == 9);
    CHECK(cfg.candidates_for("w2").size() == 2);
}

TEST_CASE("summary table formats the selection path") {
    DVineRegressionModel m;
    m.response_margin = margin(MarginFamily::normal, {0.0, 1.0});
    m.covariate_margins = {margin(MarginFamily::normal, {0.0, 1.0}),
                           margin(MarginFamily::normal, {0.0, 1.0})};
    m.order = {1, 0};
    m.trees.resize(2);
    m.trees[0] = {{BivariateCopula{Family::bb8, 180, {3.62, 0.84}, std::nullopt}, 196.19},
                  {BivariateCopula{Family::gaussian, 0, {0.2}, std::nullopt}, 5.0}};
    m.trees[1] = {{BivariateCopula{Family::frank, 0, {4.43}, std::nullopt}, 151.77}};
    m.n_train = 711;
    StepStats s1;
    s1.covariate = 1;
    s1.edge_loglik = 196.19;
    s1.edge_params = 2;
    s1.edge_tau = 0.45;
    s1.p_value = 1e-40;
    StepStats s2;
    s2.covariate = 0;
    s2.edge_loglik = 151.77;
    s2.edge_params = 1;
    s2.edge_tau = 0.42;
    s2.p_value = 1e-30;
    m.fit_stats = {s1, s2};

    auto text = format_dvine_summary(m, {"td", "lm"});
    CHECK(text.find("lm") != std::string::npos);
    CHECK(text.find("bb8@180") != std::string::npos);
    CHECK(text.find("196.19") != std::string::npos);
    CHECK(text.find("-388.38") != std::string::npos); // per-edge aic = -2*ll + 2p
    CHECK(text.find("-379.25") != std::string::npos); // per-edge bic with ln(711)
    CHECK(text.find("< 0.00") != std::string::npos);
    CHECK(text.find("frank") != std::string::npos);
}

TEST_CASE("lqr table carries significance stars") {
    QuantileRegressionFit f;
    f.alpha = 0.5;
    f.beta = {362.91, -32.13};
    f.std_error = {512.81, 3.91};
    auto text = format_lqr_table(f, {"hws"});
    CHECK(text.find("hws") != std::string::npos);
    CHECK(text.find("-32.13") != std::string::npos);
    CHECK(text.find("***") != std::string::npos);
    CHECK(text.find("(Intercept)") != std::string::npos);
}
