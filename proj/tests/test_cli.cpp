#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string g_cli; // path to the tailvine binary, from argv[1]

int run(const std::string& args) {
    std::string cmd = g_cli + " " + args + " > cli_tmp_stdout.txt 2> cli_tmp_stderr.txt";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool same_file(const std::string& a, const std::string& b) {
    return slurp(a) == slurp(b);
}

void write_config(const std::string& path, const std::string& extra = "") {
    std::ofstream out(path);
    out << "response = th80\n"
        << "covariates = lm, td, hws, tsd\n"
        << "margins.th80 = normal\n"
        << "margins.lm = normalmixture\n"
        << "margins.td = gamma\n"
        << "margins.hws = normal\n"
        << "margins.tsd = lognormal\n"
        << "thresholds = 2200, 2500\n"
        << extra;
}

} // namespace

TEST_CASE("simulate is deterministic and writes the flight schema") {
    REQUIRE(run("simulate --n 300 --seed 11 --out cli_tmp_a.csv") == 0);
    REQUIRE(run("simulate --n 300 --seed 11 --out cli_tmp_b.csv") == 0);
    CHECK(same_file("cli_tmp_a.csv", "cli_tmp_b.csv"));
    REQUIRE(run("simulate --n 300 --seed 12 --out cli_tmp_c.csv") == 0);
    CHECK(!same_file("cli_tmp_a.csv", "cli_tmp_c.csv"));

    std::ifstream in("cli_tmp_a.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "th80,lm,td,hws,ea,asd,temp,tbs,bd,trd,refAP,tsd");
}

TEST_CASE("fit assess rank pipeline") {
    write_config("cli_tmp_run.cfg");
    REQUIRE(run("simulate --n 500 --seed 21 --out cli_tmp_data.csv") == 0);
    REQUIRE(run("fit --data cli_tmp_data.csv --config cli_tmp_run.cfg "
                "--out cli_tmp_model.json --summary cli_tmp_summary.txt") == 0);

    auto summary = slurp("cli_tmp_summary.txt");
    CHECK(summary.find("lm") != std::string::npos);

    // tsd is independent noise in the generator and must not be selected
    auto model_json = slurp("cli_tmp_model.json");
    CHECK(model_json.find("covariate_names") != std::string::npos);
    {
        std::istringstream ss(summary);
        std::string line;
        int rows = 0;
        bool tsd_row = false;
        while (std::getline(ss, line)) {
            if (line.rfind("tsd", 0) == 0) tsd_row = true;
            ++rows;
        }
        CHECK(!tsd_row);
        CHECK(rows <= 4); // header + at most 3 selected covariates
    }

    REQUIRE(run("assess --model cli_tmp_model.json --data cli_tmp_data.csv "
                "--threshold 2200 --p-threshold 0.05 --out cli_tmp_rep") == 0);
    auto rep = slurp("cli_tmp_rep_c2200.csv");
    CHECK(rep.rfind("row,alpha,below_floor,logit,risky", 0) == 0);

    REQUIRE(run("rank --report cli_tmp_rep_c2200.json --data cli_tmp_data.csv "
                "--top 2 --out cli_tmp_rank.json") == 0);
    auto table = slurp("cli_tmp_stdout.txt");
    CHECK(table.find("(Intercept)") != std::string::npos);
    CHECK(table.find("Ranking by |estimate|") != std::string::npos);
}

TEST_CASE("schema problems exit with code 2") {
    write_config("cli_tmp_run.cfg");
    {
        std::ofstream out("cli_tmp_bad.csv");
        out << "foo,bar\n1,2\n3,4\n";
    }
    CHECK(run("fit --data cli_tmp_bad.csv --config cli_tmp_run.cfg "
              "--out cli_tmp_x.json") == 2);
    CHECK(slurp("cli_tmp_stderr.txt").find("missing columns") != std::string::npos);

    CHECK(run("fit --data cli_tmp_nonexistent.csv --config cli_tmp_run.cfg "
              "--out cli_tmp_x.json") == 2);

    CHECK(run("assess --model cli_tmp_model.json --data cli_tmp_bad.csv "
              "--threshold 10 --out cli_tmp_y") == 2);
}

TEST_CASE("marginal-only fit warns and succeeds") {
    {
        std::ofstream out("cli_tmp_empty.cfg");
        out << "response = th80\ncovariates =\nmargins.th80 = normal\n";
    }
    REQUIRE(run("simulate --n 200 --seed 31 --out cli_tmp_m.csv") == 0);
    CHECK(run("fit --data cli_tmp_m.csv --config cli_tmp_empty.cfg "
              "--out cli_tmp_m0.json") == 0);
    CHECK(slurp("cli_tmp_stderr.txt").find("warning") != std::string::npos);
    CHECK(slurp("cli_tmp_m0.json").find("\"order\": []") != std::string::npos);
}

TEST_CASE("rank with too few risky rows exits with code 4") {
    // a threshold beyond the support leaves no risky records
    REQUIRE(run("assess --model cli_tmp_model.json --data cli_tmp_data.csv "
                "--threshold 99999 --out cli_tmp_none") == 0);
    CHECK(run("rank --report cli_tmp_none_c99999.json --data cli_tmp_data.csv") == 4);
}

TEST_CASE("pit export, contour grid, and the jitter flag") {
    write_config("cli_tmp_run.cfg");
    REQUIRE(run("fit --data cli_tmp_data.csv --config cli_tmp_run.cfg "
                "--out cli_tmp_model2.json --pit cli_tmp_pit.csv") == 0);
    std::ifstream pit("cli_tmp_pit.csv");
    std::string header;
    std::getline(pit, header);
    CHECK(header == "th80,lm,td,hws,tsd");
    CHECK(slurp("cli_tmp_stdout.txt").find("KS distance") != std::string::npos);

    REQUIRE(run("contour --model cli_tmp_model2.json --tree 1 --edge 0 --n 15 "
                "--ascii --out cli_tmp_grid.csv") == 0);
    std::ifstream grid("cli_tmp_grid.csv");
    std::getline(grid, header);
    CHECK(header == "z1,z2,density");
    CHECK(run("contour --model cli_tmp_model2.json --tree 99 --edge 0 "
              "--out cli_tmp_g2.csv") == 2);

    write_config("cli_tmp_jit.cfg", "jitter_ties = true\n");
    CHECK(run("fit --data cli_tmp_data.csv --config cli_tmp_jit.cfg "
              "--out cli_tmp_model3.json") == 0);
}

TEST_CASE("outputs are byte-identical across runs and thread counts") {
    write_config("cli_tmp_run.cfg");
    setenv("TAILVINE_THREADS", "1", 1);
    REQUIRE(run("fit --data cli_tmp_data.csv --config cli_tmp_run.cfg "
                "--out cli_tmp_t1.json") == 0);
    setenv("TAILVINE_THREADS", "4", 1);
    REQUIRE(run("fit --data cli_tmp_data.csv --config cli_tmp_run.cfg "
                "--out cli_tmp_t4.json") == 0);
    unsetenv("TAILVINE_THREADS");
    CHECK(same_file("cli_tmp_t1.json", "cli_tmp_t4.json"));
}

int main(int argc, char** argv) {
    if (argc > 1) g_cli = argv[1];
    doctest::Context ctx;
    ctx.applyCommandLine(1, argv);
    return ctx.run();
}
