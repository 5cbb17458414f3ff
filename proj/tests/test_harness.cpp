#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qpurify/harness.hpp"

using namespace qpurify;
using harness::Config;
using harness::UsageError;

namespace {

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> lines;
    std::stringstream ss(s);
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    return fields;
}

}  // namespace

TEST_CASE("config parsing") {
    Config cfg;
    cfg.set("model", "dephasing");
    cfg.set("alpha", "0.5,-0.25");
    cfg.set("steps", "12");
    CHECK(cfg.get("model", "") == "dephasing");
    CHECK(cfg.get_int("steps", 0) == 12);
    CHECK(cfg.get_complex("alpha", cplx(0)) == cplx(0.5, -0.25));
    CHECK(cfg.get_real("gamma", 0.25) == 0.25);  // fallback
    CHECK_THROWS_AS(cfg.set("no_such_key", "1"), UsageError);

    Config bad;
    bad.set("steps", "7.5");
    CHECK_THROWS_AS(bad.get_int("steps", 0), UsageError);
}

TEST_CASE("config file round trip with overrides") {
    std::string path = std::string(QPURIFY_SOURCE_DIR) + "/build/test_cfg_tmp.cfg";
    {
        std::ofstream out(path);
        out << "# comment line\n";
        out << "model = dissipative\n";
        out << "gamma = 0.25\n\n";
        out << "tau = 1.5\n";
    }
    Config cfg;
    cfg.load_file(path);
    CHECK(cfg.get_real("gamma", 0) == 0.25);
    cfg.set("gamma", "0.5");  // flag override wins
    CHECK(cfg.get_real("gamma", 0) == 0.5);
    std::remove(path.c_str());
}

TEST_CASE("run: dephasing up state has constant unit purity") {
    Config cfg;
    cfg.set("model", "dephasing");
    cfg.set("init", "up");
    cfg.set("steps", "10");
    std::ostringstream out, err;
    REQUIRE(harness::run_command(cfg, out, err) == 0);
    auto lines = split_lines(out.str());
    REQUIRE(lines.size() == 12);  // header + 11 rows
    auto header = split_csv(lines[0]);
    CHECK(header[0] == "n");
    CHECK(header[2] == "purity");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto f = split_csv(lines[i]);
        CHECK(std::stod(f[1]) == doctest::Approx(1.0));  // trace
        CHECK(std::stod(f[2]) == doctest::Approx(1.0));  // purity
        CHECK(std::stod(f[3]) == doctest::Approx(1.0));  // fid_target = up
    }
}

TEST_CASE("run: dissipative alpha = 0 from down keeps trace 1") {
    Config cfg;
    cfg.set("model", "dissipative");
    cfg.set("alpha", "0");
    cfg.set("init", "down");
    cfg.set("steps", "8");
    std::ostringstream out, err;
    REQUIRE(harness::run_command(cfg, out, err) == 0);
    auto lines = split_lines(out.str());
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto f = split_csv(lines[i]);
        CHECK(std::stod(f[1]) == doctest::Approx(1.0));
        CHECK(std::stod(f[7]) == doctest::Approx(1.0));  // rho_dd_re
    }
}

TEST_CASE("run: resonant optimal interval purifies in one step") {
    Config cfg;
    cfg.set("model", "dephasing");
    cfg.set("omega_x", "1.0");
    cfg.set("omega_s", "1.0");
    cfg.set("g", "0.5");
    cfg.set("tau", harness::fmt_real(M_PI / (2.0 * 0.5)));
    cfg.set("gamma", "0.3");
    cfg.set("init", "mixed");
    cfg.set("steps", "5");
    std::ostringstream out, err;
    REQUIRE(harness::run_command(cfg, out, err) == 0);
    auto lines = split_lines(out.str());
    for (std::size_t i = 2; i < lines.size(); ++i) {  // from n = 1 onward
        auto f = split_csv(lines[i]);
        CHECK(std::stod(f[1]) == doctest::Approx(0.5));
        CHECK(std::stod(f[2]) == doctest::Approx(1.0));
    }
}

TEST_CASE("run: column subset and usage errors") {
    Config cfg;
    cfg.set("columns", "n,trace");
    cfg.set("steps", "3");
    std::ostringstream out, err;
    REQUIRE(harness::run_command(cfg, out, err) == 0);
    auto lines = split_lines(out.str());
    CHECK(lines[0] == "n,trace");
    CHECK(split_csv(lines[1]).size() == 2);

    Config bad;
    bad.set("columns", "n,bogus");
    std::ostringstream out2, err2;
    CHECK(harness::run_command(bad, out2, err2) == 1);
    CHECK(err2.str().find("unknown column") != std::string::npos);

    Config bad2;
    bad2.set("init", "explicit");
    bad2.set("rho_uu", "1.5");
    bad2.set("rho_dd", "-0.5");
    std::ostringstream out3, err3;
    CHECK(harness::run_command(bad2, out3, err3) == 1);
}

TEST_CASE("run output is deterministic") {
    Config cfg;
    cfg.set("model", "dissipative");
    cfg.set("gamma", "0.07");
    cfg.set("alpha", "0.9,0.1");
    cfg.set("steps", "25");
    std::ostringstream a, b, err;
    REQUIRE(harness::run_command(cfg, a, err) == 0);
    REQUIRE(harness::run_command(cfg, b, err) == 0);
    CHECK(a.str() == b.str());
    CHECK(!a.str().empty());
}

TEST_CASE("check passes on the shipped default config and honors --tol") {
    Config cfg;
    cfg.load_file(std::string(QPURIFY_SOURCE_DIR) + "/configs/check.cfg");
    std::ostringstream out, err;
    CHECK(harness::check_command(cfg, out, err) == 0);
    CHECK(out.str().find("CHECK PASS") != std::string::npos);
    CHECK(out.str().find("FAIL") == std::string::npos);

    cfg.set("tol", "1e-20");
    std::ostringstream out2, err2;
    CHECK(harness::check_command(cfg, out2, err2) == 2);
    CHECK(out2.str().find("FAIL") != std::string::npos);
}

TEST_CASE("check at gamma = 0 sits at machine epsilon") {
    Config cfg;
    cfg.load_file(std::string(QPURIFY_SOURCE_DIR) + "/configs/check.cfg");
    cfg.set("gamma", "0");
    std::ostringstream out, err;
    CHECK(harness::check_command(cfg, out, err) == 0);
}

TEST_CASE("sweep: degenerate two-point axis and lexicographic order") {
    Config cfg;
    cfg.set("model", "dissipative");
    cfg.set("steps", "10");
    cfg.set("axis1", "gamma_tau:0.01:0.1:2");
    cfg.set("axis2", "n:5:10:2");
    cfg.set("metric", "yield");
    std::ostringstream out, err;
    REQUIRE(harness::sweep_command(cfg, out, err) == 0);
    auto lines = split_lines(out.str());
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "gamma_tau,n,yield");
    // lexicographic: (0.01,5), (0.01,10), (0.1,5), (0.1,10)
    CHECK(split_csv(lines[1])[0] == split_csv(lines[2])[0]);
    CHECK(std::stod(split_csv(lines[1])[0]) == doctest::Approx(0.01));
    CHECK(std::stod(split_csv(lines[3])[0]) == doctest::Approx(0.1));
    CHECK(std::stod(split_csv(lines[1])[1]) == doctest::Approx(5));
    CHECK(std::stod(split_csv(lines[2])[1]) == doctest::Approx(10));
}

TEST_CASE("sweep: fidelity ceiling decreases with gamma_tau") {
    Config cfg;
    cfg.set("model", "dissipative");
    cfg.set("omega", "1.5");
    cfg.set("g", "1.1");
    cfg.set("tau", "2.1");
    cfg.set("delta_e_plus", "0.1");
    cfg.set("alpha", "1");
    cfg.set("init", "plusx");
    cfg.set("steps", "150");
    cfg.set("axis1", "gamma_tau:0.001:1.0:7:log");
    cfg.set("metric", "max_fid_u1");
    std::ostringstream out, err;
    REQUIRE(harness::sweep_command(cfg, out, err) == 0);
    auto lines = split_lines(out.str());
    REQUIRE(lines.size() == 8);
    double prev = 2.0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        double v = std::stod(split_csv(lines[i])[1]);
        CHECK(v <= prev + 1e-6);
        prev = v;
    }
}

TEST_CASE("sweep usage errors") {
    Config cfg;
    cfg.set("axis1", "gamma_tau:0.01:0.1:2");
    cfg.set("metric", "nope");
    std::ostringstream out, err;
    CHECK(harness::sweep_command(cfg, out, err) == 1);

    Config cfg2;
    cfg2.set("axis1", "alpha_re:0:1:3");
    cfg2.set("model", "dephasing");
    std::ostringstream out2, err2;
    CHECK(harness::sweep_command(cfg2, out2, err2) == 1);

    Config cfg3;
    cfg3.set("axis1", "gamma_tau:0.01:0.1:2000");
    cfg3.set("axis2", "tau:0.5:1.5:2000");
    std::ostringstream out3, err3;
    CHECK(harness::sweep_command(cfg3, out3, err3) == 1);
    CHECK(err3.str().find("grid too large") != std::string::npos);
}

TEST_CASE("identity-test command") {
    std::ostringstream out, err;
    CHECK(harness::identity_test_command(4, 15, 100, 12345, 1e-8, out, err) == 0);
    CHECK(out.str().find("PASS") != std::string::npos);

    std::ostringstream out2, err2;
    CHECK(harness::identity_test_command(4, 15, 100, 12345, 1e-8, out2, err2) == 0);
    CHECK(out.str() == out2.str());  // fixed seed, identical report

    std::ostringstream out3, err3;
    CHECK(harness::identity_test_command(9, 15, 100, 1, 1e-8, out3, err3) == 1);
}

TEST_CASE("CLI binary smoke test") {
    std::string bin = QPURIFY_CLI_PATH;
    std::string tmp = std::string(QPURIFY_SOURCE_DIR) + "/build/cli_smoke.csv";
    std::string cmd = bin + " run --steps 5 --out " + tmp + " 2>/dev/null";
    REQUIRE(std::system(cmd.c_str()) == 0);
    std::ifstream in(tmp);
    std::string header;
    std::getline(in, header);
    CHECK(header == "n,trace,purity,fid_target,rho_uu_re,rho_ud_re,rho_ud_im,rho_dd_re");
    std::remove(tmp.c_str());

    // usage error paths return 1
    CHECK(std::system((bin + " run --steps -3 2>/dev/null >/dev/null").c_str()) != 0);
}
