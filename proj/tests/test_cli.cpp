#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef DARKMKT_BIN
#error "DARKMKT_BIN must point at the built executable"
#endif

namespace {

struct CliResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliResult run_cli(const std::string& args) {
    const std::string base = std::string("/tmp/darkmkt_cli_") + std::to_string(::getpid());
    const std::string out = base + ".out", err = base + ".err";
    const std::string cmd =
        std::string(DARKMKT_BIN) + " " + args + " >" + out + " 2>" + err;
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WEXITSTATUS(status);
    r.out = slurp(out);
    r.err = slurp(err);
    std::remove(out.c_str());
    std::remove(err.c_str());
    return r;
}

const std::string kConfig =
    std::string(DARKMKT_SOURCE_DIR) + "/configs/two_asset_example.json";

std::string write_temp_config(const std::string& text, const std::string& tag) {
    const std::string path = "/tmp/darkmkt_cfg_" + tag + ".json";
    std::ofstream(path) << text;
    return path;
}

}  // namespace

TEST_CASE("help lists the subcommands") {
    const CliResult r = run_cli("--help");
    CHECK(r.exit_code == 0);
    for (const char* sub :
         {"solve", "simulate", "stability", "price", "sweep", "limits", "abm", "report"})
        CHECK(r.out.find(sub) != std::string::npos);
}

TEST_CASE("solve emits the steady state as JSON") {
    const CliResult r = run_cli("solve --config " + kConfig);
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("residual").get<double>() < 1e-12);
    CHECK(j.at("mu_hn")[0].get<double>() == doctest::Approx(0.020962972718639).epsilon(1e-9));
    CHECK(j.at("mu_ln").get<double>() == doctest::Approx(0.078939287305118).epsilon(1e-9));
}

TEST_CASE("invalid configs exit 1 naming the constraint") {
    const std::string bad = write_temp_config(R"({
      "K": 2, "lambda": [1250, 2000], "gamma_u": [5, 8], "gamma_d": [0.5, 3],
      "gamma_tilde_u": [2.5, 0.4], "gamma_tilde_d": [3.5, 1.5], "m": [0.5, 0.6],
      "delta_h": [2.5, 3.5], "delta_d": [0.4, 1.5], "q": 0.5, "r": 0.05})",
                                               "bad_m");
    const CliResult r = run_cli("solve --config " + bad);
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("sum of m not < 1") != std::string::npos);
    std::remove(bad.c_str());
}

TEST_CASE("missing config files exit 3") {
    const CliResult r = run_cli("solve --config /nonexistent/x.json");
    CHECK(r.exit_code == 3);
}

TEST_CASE("price at the bundled reference masses reports both price forms") {
    const CliResult r =
        run_cli("price --config " + kConfig + " --at-reference-masses --q-hat 0.5");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("price")[0].get<double>() == doctest::Approx(49.64415078821821).epsilon(1e-9));
    CHECK(j.at("price")[1].get<double>() == doctest::Approx(65.27370823677033).epsilon(1e-9));
    CHECK(j.at("price_display_form")[1].get<double>() ==
          doctest::Approx(69.65337579).epsilon(1e-6));
    CHECK(j.at("display_form_deviates")[0].get<bool>());
    CHECK(j.at("timing_days")[0].get<double>() == doctest::Approx(2.01816347).epsilon(1e-6));
    CHECK(j.at("q_effective").get<double>() ==
          doctest::Approx(0.13716687114272885).epsilon(1e-9));
    CHECK(j.at("Gamma")[0].get<double>() == doctest::Approx(5.71593798734).epsilon(1e-9));
}

TEST_CASE("sweep output is deterministic byte for byte") {
    const std::string out1 = "/tmp/darkmkt_sweep_1.csv";
    const std::string out2 = "/tmp/darkmkt_sweep_2.csv";
    const std::string args = "sweep --config " + kConfig +
                             " --param lambda.2 --grid 0:100:400 --price 1 --mode frozen";
    CHECK(run_cli(args + " --out " + out1).exit_code == 0);
    CHECK(run_cli(args + " --out " + out2).exit_code == 0);
    const std::string a = slurp(out1), b = slurp(out2);
    CHECK(!a.empty());
    CHECK(a == b);
    CHECK(a.rfind("param_value,P_1,P_2,converged\n", 0) == 0);
    // the lambda_2 = 0 grid point is marked failed, the rest converge
    std::istringstream ss(a);
    std::string line;
    std::getline(ss, line);
    std::getline(ss, line);
    CHECK(line.find(",0") == line.size() - 2);
    std::remove(out1.c_str());
    std::remove(out2.c_str());
}

TEST_CASE("abm runs are reproducible through the CLI") {
    const std::string args = "abm --config " + kConfig +
                             " --agents 2000 --t-max 1 --seed 42 --sample-dt 0.1";
    const CliResult a = run_cli(args);
    const CliResult b = run_cli(args);
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("t,h1_n,h2_n,l1_o,l2_o,h1_o,h2_o,l_n\n", 0) == 0);
}

TEST_CASE("simulate writes the trajectory CSV") {
    const CliResult r = run_cli("simulate --config " + kConfig + " --dt 0.001 --t-max 0.05");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("t,mu_h1n,mu_h2n,mu_l1o,mu_l2o\n", 0) == 0);
}

TEST_CASE("stability reports a stable verdict for the bundled example") {
    const CliResult r = run_cli("stability --config " + kConfig);
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("verdict").get<std::string>() == "asymptotically stable");
    CHECK(j.at("max_real_part").get<double>() < 0.0);
    CHECK(j.at("minors").size() == 2);
    CHECK(j.at("steady_state").at("residual").get<double>() < 1e-12);
}

TEST_CASE("limits emits analytic and published forms with flags") {
    const CliResult r = run_cli("limits --config " + kConfig + " --kind lambda");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("kind").get<std::string>() == "lambda");
    CHECK(j.at("analytic").size() == 2);
    CHECK(j.at("reference_formula_deviates").get<bool>());
    CHECK(j.at("converged")[0].get<bool>());
    CHECK(j.contains("theta_path_limits"));
}

TEST_CASE("report prints reference and computed tables") {
    const CliResult r = run_cli("report --config " + kConfig);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("reference") != std::string::npos);
    CHECK(r.out.find("computed (solved)") != std::string::npos);
    CHECK(r.out.find("50.0031") != std::string::npos);
    CHECK(r.out.find("verdict asymptotically stable") != std::string::npos);
}

TEST_CASE("unknown flags fail fast") {
    const CliResult r = run_cli("solve --config " + kConfig + " --bogus 1");
    CHECK(r.exit_code != 0);
}
