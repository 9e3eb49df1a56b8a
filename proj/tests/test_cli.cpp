#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "involab/cli.hpp"

using namespace involab;

namespace {

struct RunResult {
    int code;
    std::string out;
    std::string err;
    json parsed() const { return json::parse(out); }
};

RunResult run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("compute subcommand equals direct library calls") {
    auto r = run_cli({"compute", "--cycle-type", "5"});
    REQUIRE(r.code == 0);
    auto j = r.parsed();
    CHECK(j.at("invol").get<std::string>() == "5");
    CHECK(j.at("B").get<std::string>() == "5");
    CHECK(j.at("schema_version").get<int>() == 1);

    // thin-adapter property on a small matrix of cycle types
    for (const std::string type : {"1^2 2", "3^2 1", "2^3", "7"}) {
        auto rr = run_cli({"compute", "--cycle-type", type});
        REQUIRE(rr.code == 0);
        const auto c = cli::parse_cycle_type(type);
        auto jj = rr.parsed();
        CHECK(jj.at("invol").get<std::string>() == invol(c).str());
        CHECK(jj.at("B").get<std::string>() == big_b(c).str());
        CHECK(jj.at("invol_hermite").get<std::string>() == invol_hermite(c).str());
    }

    auto dense = run_cli({"compute", "--counts", "2,1"});
    REQUIRE(dense.code == 0);
    CHECK(dense.parsed().at("invol").get<std::string>() == "4");
}

TEST_CASE("oracle subcommand") {
    auto r = run_cli({"oracle", "--perm", "2,3,1"});
    REQUIRE(r.code == 0);
    auto j = r.parsed();
    CHECK(j.at("brute_force").get<std::string>() == "3");
    CHECK(j.at("invol").get<std::string>() == "3");

    auto sweep = run_cli({"oracle", "--sweep", "--n", "5"});
    REQUIRE(sweep.code == 0);
    CHECK(sweep.parsed().at("all_equal").get<bool>());
    CHECK(sweep.parsed().at("permutations_checked").get<std::int64_t>() == 120);
}

TEST_CASE("moments subcommand equals the library and accepts rational theta") {
    auto r = run_cli({"moments", "--n", "2", "--theta", "1"});
    REQUIRE(r.code == 0);
    auto j = r.parsed();
    CHECK(j.at("mean").get<std::string>() == "2");
    CHECK(j.at("second_moment").get<std::string>() == "4");

    auto r2 = run_cli({"moments", "--n", "7", "--theta", "7/2"});
    REQUIRE(r2.code == 0);
    const auto params = ESFParams::from_rational(BigRat(7, 2));
    CHECK(r2.parsed().at("mean").get<std::string>() == rational_to_string(mean_invol_exact(7, params)));

    // decimal literals are exact: 0.5 == 1/2
    auto r3 = run_cli({"moments", "--n", "6", "--theta", "0.5", "--exact"});
    const auto half = ESFParams::from_rational(BigRat(1, 2));
    CHECK(r3.parsed().at("mean").get<std::string>() == rational_to_string(mean_invol_exact(6, half)));
}

TEST_CASE("moments coefficient dump") {
    const std::string path = "/tmp/involab_coeffs_test.csv";
    auto r = run_cli({"moments", "--n", "4", "--theta", "1", "--dump-coeffs", path});
    REQUIRE(r.code == 0);
    std::ifstream in(path);
    std::string header, line1, line2;
    std::getline(in, header);
    std::getline(in, line1);
    std::getline(in, line2);
    CHECK(header == "index,numerator,denominator");
    CHECK(line1 == "0,1,1");
    CHECK(line2 == "1,1,1");
    std::remove(path.c_str());
}

TEST_CASE("asym subcommand matches library values") {
    auto r = run_cli({"asym", "--which", "mean", "--n", "1000", "--theta", "1"});
    REQUIRE(r.code == 0);
    const double got = r.parsed().at("estimate").at("value").get<double>();
    CHECK(got == Catch::Approx(mean_asym(1000, Real(1)).value.convert_to<double>()).epsilon(1e-12));
    CHECK(r.parsed().at("claimed_error_exponent").get<std::string>() == "-1/2");

    auto r2 = run_cli({"asym", "--which", "skew", "--n", "100000", "--xi1", "20", "--xi2", "20"});
    REQUIRE(r2.code == 0);
    CHECK(r2.parsed().at("prob_guarantee").get<double>() > 0.8);

    auto r3 = run_cli({"asym", "--which", "conditional", "--n", "2000", "--m", "2"});
    REQUIRE(r3.code == 0);
    CHECK(r3.parsed().contains("exact"));
}

TEST_CASE("mellin subcommand emits the comparison table") {
    auto r = run_cli({"mellin", "--theta", "0.5", "--t-grid", "0.2,0.1"});
    REQUIRE(r.code == 0);
    const auto rows = r.parsed().at("rows");
    REQUIRE(rows.size() == 2);
    const Real lhs = mellin_lhs(Real(0.2), Real(0.5));
    CHECK(rows[0].at("lhs").get<double>() == Catch::Approx(lhs.convert_to<double>()).epsilon(1e-12));
}

TEST_CASE("exit codes: usage 64, precondition 2, success 0") {
    CHECK(run_cli({"compute", "--no-such-flag"}).code == 64);
    CHECK(run_cli({"no-such-command"}).code == 64);
    CHECK(run_cli({}).code == 64);
    // xi1 below the bound's stated floor
    auto r = run_cli({"asym", "--which", "skew", "--n", "100000", "--xi1", "5", "--xi2", "5"});
    CHECK(r.code == 2);
    CHECK(r.err.find("precondition") != std::string::npos);
    CHECK(run_cli({"compute", "--cycle-type", "4"}).code == 0);
}

TEST_CASE("clt reruns are byte-identical modulo the wall clock") {
    auto args = std::vector<std::string>{"clt", "--n", "500", "--samples", "400",
                                         "--theta", "1", "--seed", "42"};
    auto a = run_cli(args);
    auto b = run_cli(args);
    REQUIRE(a.code == 0);
    auto ja = a.parsed();
    auto jb = b.parsed();
    ja.erase("wall_ms");
    jb.erase("wall_ms");
    CHECK(ja.dump() == jb.dump());
    // and the library call agrees with the CLI output
    ExperimentConfig cfg;
    cfg.n_grid = {500};
    cfg.samples = 400;
    cfg.theta = 1.0;
    cfg.seed = 42;
    auto direct = clt_experiment(cfg);
    direct.erase("wall_ms");
    CHECK(direct.dump() == ja.dump());
}

TEST_CASE("config file drives an experiment run") {
    const std::string path = "/tmp/involab_cli_config.cfg";
    {
        std::ofstream out(path);
        out << "n=300\nsamples=200\ntheta=1\nseed=5\n";
    }
    auto r = run_cli({"membership", "--config", path, "--xi", "2,4"});
    REQUIRE(r.code == 0);
    auto j = r.parsed();
    CHECK(j.at("config").at("samples").get<std::int64_t>() == 200);
    CHECK(j.at("config").at("n_grid")[0].get<std::int64_t>() == 300);
    CHECK(j.at("results").at("rows").size() == 2);
    std::remove(path.c_str());
}

TEST_CASE("csv format and output redirection through the environment") {
    auto r = run_cli({"compose-bias", "--n", "40", "--pairs", "100", "--seed", "3",
                      "--format", "csv"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# table: rows") != std::string::npos);
    CHECK(r.out.find("finite_n_mean") != std::string::npos);

    setenv("INVOLAB_OUT_DIR", "/tmp", 1);
    const std::string name = "involab_env_out_test.json";
    auto r2 = run_cli({"clt", "--n", "200", "--samples", "100", "--seed", "1", "--out", name});
    REQUIRE(r2.code == 0);
    std::ifstream in("/tmp/" + name);
    REQUIRE(in.good());
    json j;
    in >> j;
    CHECK(j.at("experiment").get<std::string>() == "clt");
    unsetenv("INVOLAB_OUT_DIR");
    std::remove(("/tmp/" + name).c_str());
}
