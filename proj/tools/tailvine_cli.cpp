// Command-line front end: fit, assess, rank, benchmark-lqr, simulate.
// Exit codes: 0 success, 2 input/schema error, 3 numerical failure,
// 4 insufficient data.

#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tailvine/tailvine.hpp"

using namespace tailvine;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSchema = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitInsufficient = 4;

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Dataset {
    std::vector<double> y;
    std::vector<std::vector<double>> x_cols; // by covariate position in config
    std::vector<std::string> cov_names;
    std::string response_name;
};

void jitter_column(std::vector<double>& col, std::uint64_t seed) {
    std::vector<double> sorted = col;
    std::sort(sorted.begin(), sorted.end());
    double gap = 0.0;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        double d = sorted[i] - sorted[i - 1];
        if (d > 0.0 && (gap == 0.0 || d < gap)) gap = d;
    }
    if (gap == 0.0) return;
    bool has_ties = std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
    if (!has_ties) return;
    Rng rng(seed);
    for (auto& v : col) v += gap * (rng.uniform() - 0.5);
}

Dataset extract_dataset(const Table& table, const RunConfig& cfg) {
    Dataset ds;
    ds.response_name = cfg.response;
    int ri = table.col_index(cfg.response);
    std::string missing;
    if (ri < 0) missing += " " + cfg.response;
    for (const auto& name : cfg.covariates)
        if (table.col_index(name) < 0) missing += " " + name;
    if (!missing.empty()) {
        std::string have;
        for (const auto& n : table.names) have += " " + n;
        throw SchemaError("missing columns:" + missing + "; file provides:" + have);
    }
    ds.y = table.cols[ri];
    for (const auto& name : cfg.covariates) {
        ds.cov_names.push_back(name);
        ds.x_cols.push_back(table.cols[table.col_index(name)]);
    }
    if (cfg.jitter_ties)
        for (std::size_t k = 0; k < ds.x_cols.size(); ++k)
            jitter_column(ds.x_cols[k], cfg.seed + 1000003ULL * (k + 1));
    return ds;
}

Table load_table(const std::string& path, const RunConfig& cfg) {
    try {
        Table t = read_csv(path, cfg.ignore_discrete);
        for (const auto& r : t.rejected)
            std::cerr << "note: ignoring non-numeric column '" << r << "'\n";
        return t;
    } catch (const std::exception& e) {
        throw SchemaError(e.what());
    }
}

MarginalModel fit_margin_for(const std::vector<double>& col, const std::string& name,
                             const RunConfig& cfg) {
    return select_margin(col, cfg.candidates_for(name));
}

// ------------------------------------------------------------------- fit

int cmd_fit(const std::string& data_path, const std::string& config_path,
            const std::string& out_path, const std::string& summary_path,
            const std::string& tau_matrix_path, const std::string& pit_path) {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    Table table = load_table(data_path, cfg);
    Dataset ds = extract_dataset(table, cfg);

    MarginalModel ymargin = fit_margin_for(ds.y, cfg.response, cfg);
    std::vector<MarginalModel> xmargins;
    for (std::size_t k = 0; k < ds.x_cols.size(); ++k)
        xmargins.push_back(fit_margin_for(ds.x_cols[k], ds.cov_names[k], cfg));

    if (!pit_path.empty()) {
        std::vector<std::vector<double>> cols{ds.y};
        std::vector<MarginalModel> margins{ymargin};
        std::vector<std::string> names{ds.response_name};
        for (std::size_t k = 0; k < ds.x_cols.size(); ++k) {
            cols.push_back(ds.x_cols[k]);
            margins.push_back(xmargins[k]);
            names.push_back(ds.cov_names[k]);
        }
        auto pit = pit_transform(cols, margins);
        write_csv(pit_path, names, pit.columns);
        for (std::size_t k = 0; k < names.size(); ++k)
            std::printf("pit %-8s KS distance %.4f (p = %.3f)\n", names[k].c_str(),
                        pit.ks_distance[k], pit.ks_pvalue[k]);
    }

    DVineRegressionModel model;
    SelectionTrace trace;
    if (ds.x_cols.empty()) {
        std::cerr << "warning: no covariates configured; the model reduces to the "
                     "response margin\n";
        model.response_margin = ymargin;
        model.n_train = ds.y.size();
    } else {
        auto fit = fit_dvine_regression(ds.y, ds.x_cols, ymargin, xmargins,
                                        cfg.catalog(), cfg.selection_criterion());
        model = std::move(fit.model);
        trace = std::move(fit.trace);
    }

    save_json_file(out_path, to_json(model, ds.cov_names, ds.response_name));
    std::string summary = format_dvine_summary(model, ds.cov_names);
    std::cout << summary;
    std::cout << "stop reason: "
              << (trace.stop_reason.empty() ? "no covariates" : trace.stop_reason)
              << "\n";
    if (!summary_path.empty()) {
        std::ofstream out(summary_path);
        out << summary;
    }

    if (!tau_matrix_path.empty() && !ds.x_cols.empty()) {
        // pairwise Kendall tau of the PIT values, response first
        std::vector<std::vector<double>> pit{ds.y};
        std::vector<std::string> names{ds.response_name};
        for (std::size_t i = 0; i < pit[0].size(); ++i)
            pit[0][i] = clamp_unit(margin_cdf(ymargin, ds.y[i]));
        for (std::size_t k = 0; k < ds.x_cols.size(); ++k) {
            names.push_back(ds.cov_names[k]);
            std::vector<double> u(ds.x_cols[k].size());
            for (std::size_t i = 0; i < u.size(); ++i)
                u[i] = clamp_unit(margin_cdf(xmargins[k], ds.x_cols[k][i]));
            pit.push_back(std::move(u));
        }
        std::vector<std::vector<double>> tau(names.size(),
                                             std::vector<double>(names.size(), 1.0));
        for (std::size_t a = 0; a < pit.size(); ++a)
            for (std::size_t b = a + 1; b < pit.size(); ++b)
                tau[a][b] = tau[b][a] = kendall_tau(pit[a], pit[b]);
        write_csv(tau_matrix_path, names, tau);
    }
    return kExitOk;
}

// ------------------------------------------------------------------- assess

std::string threshold_tag(double c) {
    char buf[32];
    if (c == static_cast<long long>(c))
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(c));
    else
        std::snprintf(buf, sizeof buf, "%g", c);
    return buf;
}

int cmd_assess(const std::string& model_path, const std::string& data_path,
               std::vector<double> thresholds, double p_threshold, double floor,
               const std::string& out_prefix) {
    json mj = load_json_file(model_path);
    DVineRegressionModel model = model_from_json(mj);
    std::vector<std::string> cov_names =
        mj.value("covariate_names", std::vector<std::string>{});

    RunConfig cfg;
    Table table = load_table(data_path, cfg);

    // columns indexed like the model's covariates
    std::vector<std::vector<double>> x_cols(model.covariate_margins.size());
    std::size_t n_rows = table.n_rows();
    for (int k : model.order) {
        std::string name = static_cast<std::size_t>(k) < cov_names.size()
                               ? cov_names[k]
                               : "x" + std::to_string(k);
        int idx = table.col_index(name);
        if (idx < 0) throw SchemaError("data lacks model covariate column '" + name + "'");
        x_cols[k] = table.cols[idx];
    }

    if (thresholds.empty()) thresholds = {2200.0, 2400.0, 2500.0};
    std::printf("%12s %14s %18s %12s\n", "threshold", "risky", "above_floor", "max_alpha");
    for (double c : thresholds) {
        auto rep = identify_risky(model, x_cols, n_rows, c, p_threshold, floor);
        std::string tag = threshold_tag(c);
        json jr = to_json(rep);
        jr["covariate_names"] = cov_names;
        jr["order"] = model.order;
        jr["model_path"] = model_path;
        save_json_file(out_prefix + "_c" + tag + ".json", jr);
        write_risk_csv(out_prefix + "_c" + tag + ".csv", rep);
        double pct = n_rows ? 100.0 * rep.n_above_floor / n_rows : 0.0;
        std::printf("%12s %14zu %11zu (%5.2f%%) %12.3g\n", tag.c_str(), rep.n_risky,
                    rep.n_above_floor, pct, rep.max_alpha);
    }
    return kExitOk;
}

// ------------------------------------------------------------------- rank

int cmd_rank(const std::string& report_path, const std::string& data_path, int top,
             bool full_sample, const std::string& out_path) {
    json jr = load_json_file(report_path);
    RiskReport rep = risk_report_from_json(jr);
    std::vector<std::string> cov_names =
        jr.value("covariate_names", std::vector<std::string>{});
    std::vector<int> order = jr.value("order", std::vector<int>{});
    if (cov_names.empty() || order.empty())
        throw SchemaError("report lacks covariate names or model order");

    RunConfig cfg;
    Table table = load_table(data_path, cfg);

    std::vector<std::size_t> risky_rows;
    std::vector<double> eta;
    for (const auto& r : rep.records)
        if (r.risky && !r.below_floor) {
            risky_rows.push_back(r.row);
            eta.push_back(r.logit_alpha);
        }
    if (risky_rows.size() < order.size() + 2)
        throw InsufficientData("only " + std::to_string(risky_rows.size()) +
                               " risky records for " + std::to_string(order.size()) +
                               " factors; need at least d+2");

    auto build = [&](const std::vector<int>& factor_set) {
        std::vector<std::vector<double>> cols;
        std::vector<std::string> names;
        for (int k : factor_set) {
            std::string name = cov_names[k];
            int idx = table.col_index(name);
            if (idx < 0) throw SchemaError("data lacks column '" + name + "'");
            std::vector<double> sub;
            if (full_sample) {
                sub = table.cols[idx];
            } else {
                for (std::size_t row : risky_rows) {
                    if (row >= table.n_rows())
                        throw SchemaError("report row " + std::to_string(row) +
                                          " outside the data");
                    sub.push_back(table.cols[idx][row]);
                }
            }
            auto z = standardize({sub})[0];
            if (full_sample) {
                std::vector<double> zr;
                for (std::size_t row : risky_rows) zr.push_back(z[row]);
                z = std::move(zr);
            }
            cols.push_back(std::move(z));
            names.push_back(name);
        }
        return std::pair{cols, names};
    };

    auto [zcols, znames] = build(order);
    auto res = ols_rank(eta, zcols, znames);
    std::cout << format_ranking_table(res);

    json out;
    out["full"] = to_json(res);
    if (top > 0 && static_cast<std::size_t>(top) < order.size()) {
        std::vector<int> top_set;
        for (int r = 0; r < top; ++r)
            top_set.push_back(order[res.ranking[r] - 1]);
        auto [zt, nt] = build(top_set);
        auto res_top = ols_rank(eta, zt, nt);
        std::cout << "\ntop-" << top << " refit:\n" << format_ranking_table(res_top);
        out["top"] = to_json(res_top);
    }
    if (!out_path.empty()) save_json_file(out_path, out);
    return kExitOk;
}

// ------------------------------------------------------------- benchmark-lqr

int cmd_benchmark_lqr(const std::string& data_path, const std::string& config_path,
                      std::vector<double> levels, int bootstrap,
                      const std::string& out_prefix) {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    Table table = load_table(data_path, cfg);
    Dataset ds = extract_dataset(table, cfg);
    const std::size_t n = ds.y.size();

    if (levels.empty())
        levels = {0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99};
    std::sort(levels.begin(), levels.end());

    MarginalModel ymargin = fit_margin_for(ds.y, cfg.response, cfg);
    std::vector<MarginalModel> xmargins;
    for (std::size_t k = 0; k < ds.x_cols.size(); ++k)
        xmargins.push_back(fit_margin_for(ds.x_cols[k], ds.cov_names[k], cfg));

    // coefficient tables with bootstrap standard errors at the median and an
    // upper level, mirroring the usual reporting pair
    for (double a : {0.5, 0.9}) {
        auto fit = fit_lqr(ds.y, ds.x_cols, a, bootstrap, cfg.seed);
        std::cout << format_lqr_table(fit, ds.cov_names) << "\n";
    }

    auto grid = QuantileGrid::from_data(ds.y, ds.x_cols, levels);
    auto vine_gauss = fit_dvine_regression(ds.y, ds.x_cols, ymargin, xmargins,
                                           gaussian_catalog(),
                                           cfg.selection_criterion());
    auto vine_par = fit_dvine_regression(ds.y, ds.x_cols, ymargin, xmargins,
                                         cfg.catalog(), cfg.selection_criterion());

    // quantile-crossing report over the observed covariate rows
    std::vector<std::vector<double>> points(n);
    for (std::size_t i = 0; i < n; ++i) {
        points[i].resize(ds.x_cols.size());
        for (std::size_t k = 0; k < ds.x_cols.size(); ++k)
            points[i][k] = ds.x_cols[k][i];
    }
    auto crossing = detect_quantile_crossing(grid, points);
    std::set<std::size_t> crossing_rows;
    for (const auto& c : crossing.crossings) crossing_rows.insert(c.x_index);

    auto count_vine = [&](const DVineRegressionModel& model, double c) {
        std::vector<std::vector<double>> cols(model.covariate_margins.size());
        for (int k : model.order) cols[k] = ds.x_cols[k];
        return identify_risky(model, cols, n, c, cfg.p_threshold, cfg.floor)
            .n_above_floor;
    };
    auto count_lqr = [&](double c) {
        std::size_t cnt = 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> preds;
            for (const auto& f : grid.fits)
                preds.push_back(predict_quantile_lqr(f, points[i]));
            double lo = *std::min_element(preds.begin(), preds.end());
            double hi = *std::max_element(preds.begin(), preds.end());
            if (c <= lo) { ++cnt; continue; } // exceedance near 1
            if (c > hi) continue; // beyond the span: no estimate above the floor
            auto inv = invert_lqr_bisection(grid, c, points[i]);
            if (inv.status == InversionStatus::found &&
                1.0 - inv.alpha > cfg.floor)
                ++cnt;
            else if (inv.status == InversionStatus::multiple)
                ++cnt; // crossing: some level attains the threshold
        }
        return cnt;
    };

    json out;
    out["levels"] = levels;
    out["crossing_rows"] = crossing_rows.size();
    out["crossing_pairs"] = crossing.crossings.size();
    json rows = json::array();
    std::printf("%10s %16s %18s %16s\n", "threshold", "lqr", "dvine_gauss",
                "dvine_par");
    for (double c : cfg.thresholds) {
        std::size_t nl = count_lqr(c);
        std::size_t ng = count_vine(vine_gauss.model, c);
        std::size_t np = count_vine(vine_par.model, c);
        auto pct = [&](std::size_t k) { return n ? 100.0 * k / n : 0.0; };
        std::printf("%10s %8zu (%5.2f%%) %10zu (%5.2f%%) %8zu (%5.2f%%)\n",
                    threshold_tag(c).c_str(), nl, pct(nl), ng, pct(ng), np, pct(np));
        rows.push_back({{"threshold", c},
                        {"lqr", nl},
                        {"dvine_gauss", ng},
                        {"dvine_par", np}});
    }
    out["counts"] = rows;
    std::printf("rows with crossing quantile predictions: %zu of %zu\n",
                crossing_rows.size(), n);
    if (!out_prefix.empty()) {
        save_json_file(out_prefix + "_counts.json", out);
        save_json_file(out_prefix + "_model_gauss.json",
                       to_json(vine_gauss.model, ds.cov_names, ds.response_name));
        save_json_file(out_prefix + "_model_par.json",
                       to_json(vine_par.model, ds.cov_names, ds.response_name));
    }
    return kExitOk;
}

// ------------------------------------------------------------------ simulate

// built-in ground truth loosely following the flight-data schema: first-tree
// dependence on the response plus light deeper-tree structure
DVineRegressionModel builtin_truth() {
    auto margin = [](MarginFamily f, std::vector<double> p) {
        MarginalModel m;
        m.family = f;
        m.params = std::move(p);
        finalize_margin(m);
        return m;
    };
    DVineRegressionModel m;
    m.response_margin = margin(MarginFamily::normal, {1739.943, 259.2278});
    m.covariate_margins = {
        margin(MarginFamily::normal, {-0.7578, 2.9865}),            // hws
        margin(MarginFamily::log_normal, {5.6462, 0.0245}),         // temp
        margin(MarginFamily::normal, {1023.067, 9.8146}),           // refAP
        margin(MarginFamily::normal, {0.3789, 1.8669}),             // asd
        margin(MarginFamily::gev, {2.9832, 0.7539, 0.0580}),        // trd
        margin(MarginFamily::log_normal, {1.2064, 0.0826}),         // tsd
        margin(MarginFamily::normal_mixture,
               {265.3788, 304.4632, 336.5114, 24.928, 16.6916, 4.0202,
                0.3, 0.5, 0.2}),                                    // lm
        margin(MarginFamily::gev, {1.6125, 1.5624, 0.5771}),        // tbs
        margin(MarginFamily::normal_mixture,
               {10.7978, 18.3855, 4.3706, 2.8982, 0.282, 0.718}),   // bd
        margin(MarginFamily::gamma, {12.6204, 0.0285}),             // td
        margin(MarginFamily::normal, {-1.722, 0.25}),               // ea
    };
    m.order = {6, 9, 0, 10, 3, 1, 7, 8, 4, 2, 5};
    auto cop = [](Family f, std::vector<double> p, int rot = 0) {
        BivariateCopula c;
        c.family = f;
        c.rotation = rot;
        c.params = std::move(p);
        return c;
    };
    const std::size_t d = m.order.size();
    m.trees.resize(d);
    // first tree along the path
    std::vector<BivariateCopula> t1{
        cop(Family::bb8, {3.62, 0.84}, 180), cop(Family::joe, {1.03}, 180),
        cop(Family::gaussian, {-0.09}),      cop(Family::bb1, {0.11, 1.03}),
        cop(Family::frank, {-1.47}),         cop(Family::independence, {}),
        cop(Family::frank, {-0.37}),         cop(Family::clayton, {1.22}, 90),
        cop(Family::frank, {0.90}),          cop(Family::independence, {}),
        cop(Family::independence, {})};
    for (auto& c : t1) m.trees[0].push_back({std::move(c), 0.0});
    // response edges of the deeper trees; covariate-only edges independent
    std::vector<BivariateCopula> vedges{
        cop(Family::frank, {4.43}),    cop(Family::gaussian, {-0.50}),
        cop(Family::gaussian, {0.44}), cop(Family::gaussian, {0.45}),
        cop(Family::frank, {1.86}),    cop(Family::frank, {2.11}),
        cop(Family::frank, {2.02}),    cop(Family::gumbel, {1.09}),
        cop(Family::gumbel, {1.12}, 90), cop(Family::independence, {})};
    for (std::size_t t = 2; t <= d; ++t) {
        m.trees[t - 1].push_back({vedges[t - 2], 0.0});
        for (std::size_t i = 1; i <= d - t; ++i)
            m.trees[t - 1].push_back({cop(Family::independence, {}), 0.0});
    }
    m.validate();
    return m;
}

int cmd_simulate(const std::string& config_path, std::size_t n, std::uint64_t seed,
                 const std::string& out_path) {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    DVineRegressionModel truth;
    std::vector<std::string> cov_names;
    std::string response_name;
    if (!cfg.truth_model.empty()) {
        json j = load_json_file(cfg.truth_model);
        truth = model_from_json(j);
        cov_names = j.value("covariate_names", std::vector<std::string>{});
        response_name = j.value("response_name", std::string{});
    } else {
        truth = builtin_truth();
        cov_names = RunConfig{}.covariates;
        response_name = "th80";
    }
    if (response_name.empty()) response_name = cfg.response;
    if (cov_names.empty())
        for (std::size_t k = 0; k < truth.covariate_margins.size(); ++k)
            cov_names.push_back("x" + std::to_string(k));

    auto sim = simulate_dvine(truth, n, seed);
    std::vector<std::string> names{response_name};
    std::vector<std::vector<double>> cols{sim.y};
    for (std::size_t t = 0; t < sim.covariate_indices.size(); ++t) {
        names.push_back(cov_names[sim.covariate_indices[t]]);
        cols.push_back(sim.x_cols[t]);
    }
    write_csv(out_path, names, cols);
    std::printf("wrote %zu rows, %zu columns to %s\n", n, names.size(),
                out_path.c_str());
    return kExitOk;
}

} // namespace

int cmd_contour(const std::string& model_path, int tree, int edge, int n,
                double z_range, bool ascii, const std::string& out_path) {
    json mj = load_json_file(model_path);
    DVineRegressionModel model = model_from_json(mj);
    if (tree < 1 || static_cast<std::size_t>(tree) > model.trees.size() || edge < 0 ||
        static_cast<std::size_t>(edge) >= model.trees[tree - 1].size())
        throw SchemaError("contour: no edge (" + std::to_string(tree) + ", " +
                          std::to_string(edge) + ") in this model");
    auto grid = normalized_contour_grid(model.trees[tree - 1][edge].cop, n, z_range);
    if (!out_path.empty()) {
        // long format: z1, z2, density
        std::vector<double> z1, z2, g;
        for (std::size_t i = 0; i < grid.z.size(); ++i)
            for (std::size_t j = 0; j < grid.z.size(); ++j) {
                z1.push_back(grid.z[i]);
                z2.push_back(grid.z[j]);
                g.push_back(grid.density[i][j]);
            }
        write_csv(out_path, {"z1", "z2", "density"}, {z1, z2, g});
    }
    if (ascii) std::cout << ascii_contour(grid);
    return kExitOk;
}

int main(int argc, char** argv) {
    CLI::App app{"D-vine copula quantile regression and tail-risk estimation"};
    app.require_subcommand(1);

    std::string data, config, model, out, report, summary, tau_matrix, prefix, pit;
    std::vector<double> thresholds, levels;
    double p_threshold = 1e-3, floor = 1e-13, z_range = 3.0;
    int top = 0, bootstrap = 500, tree = 1, edge = 0, grid_n = 41;
    bool full_sample = false, ascii = false;
    std::size_t n = 1000;
    std::uint64_t seed = 1;

    auto* fit = app.add_subcommand("fit", "fit a D-vine regression model");
    fit->add_option("--data", data, "input CSV")->required();
    fit->add_option("--config", config, "run configuration file");
    fit->add_option("--out", out, "output model JSON")->required();
    fit->add_option("--summary", summary, "also write the summary table here");
    fit->add_option("--tau-matrix", tau_matrix, "write pairwise PIT Kendall tau CSV");
    fit->add_option("--pit", pit, "write the PIT matrix CSV with per-column KS stats");

    auto* assess = app.add_subcommand("assess", "exceedance probabilities per record");
    assess->add_option("--model", model, "fitted model JSON")->required();
    assess->add_option("--data", data, "input CSV")->required();
    assess->add_option("--threshold", thresholds, "threshold(s) c");
    assess->add_option("--p-threshold", p_threshold, "risky cutoff");
    assess->add_option("--floor", floor, "reporting floor");
    assess->add_option("--out", prefix, "output prefix")->required();

    auto* rank = app.add_subcommand("rank", "rank contributing factors on risky rows");
    rank->add_option("--report", report, "assess report JSON")->required();
    rank->add_option("--data", data, "input CSV")->required();
    rank->add_option("--top", top, "refit on the top K factors");
    rank->add_flag("--full-sample", full_sample, "standardize over all rows");
    rank->add_option("--out", out, "output JSON");

    auto* bench = app.add_subcommand("benchmark-lqr",
                                     "compare lqr, gaussian vine and full vine");
    bench->add_option("--data", data, "input CSV")->required();
    bench->add_option("--config", config, "run configuration file");
    bench->add_option("--levels", levels, "quantile levels for the lqr grid");
    bench->add_option("--bootstrap", bootstrap, "bootstrap resamples for lqr SEs");
    bench->add_option("--out", prefix, "output prefix");

    auto* contour = app.add_subcommand("contour",
                                       "normalized contour density grid of an edge");
    contour->add_option("--model", model, "fitted model JSON")->required();
    contour->add_option("--tree", tree, "tree level, 1-based");
    contour->add_option("--edge", edge, "edge position within the tree, 0-based");
    contour->add_option("--n", grid_n, "grid resolution per axis");
    contour->add_option("--range", z_range, "half-width of the z grid");
    contour->add_flag("--ascii", ascii, "print an ASCII shading to stdout");
    contour->add_option("--out", out, "grid CSV (long format z1,z2,density)");

    auto* sim_cmd = app.add_subcommand("simulate", "draw a synthetic dataset");
    sim_cmd->add_option("--config", config, "run configuration file");
    sim_cmd->add_option("--n", n, "number of rows");
    sim_cmd->add_option("--seed", seed, "random seed");
    sim_cmd->add_option("--out", out, "output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitSchema;
    }

    try {
        if (fit->parsed()) return cmd_fit(data, config, out, summary, tau_matrix, pit);
        if (assess->parsed())
            return cmd_assess(model, data, thresholds, p_threshold, floor, prefix);
        if (rank->parsed()) return cmd_rank(report, data, top, full_sample, out);
        if (bench->parsed())
            return cmd_benchmark_lqr(data, config, levels, bootstrap, prefix);
        if (contour->parsed())
            return cmd_contour(model, tree, edge, grid_n, z_range, ascii, out);
        if (sim_cmd->parsed()) return cmd_simulate(config, n, seed, out);
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const InsufficientData& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInsufficient;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}
