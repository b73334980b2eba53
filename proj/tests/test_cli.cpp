#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef CANON_CLI_PATH
#define CANON_CLI_PATH "./canon"
#endif

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string tmp = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                      "/canon_cli_out.txt";
    std::string cmd = std::string(CANON_CLI_PATH) + " " + args + " > " + tmp + " 2>&1";
    int rc = std::system(cmd.c_str());
    std::ifstream f(tmp);
    std::stringstream ss;
    ss << f.rdbuf();
    return {WEXITSTATUS(rc), ss.str()};
}

std::string tmp_path(const std::string& name) {
    return std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") + "/" + name;
}

}  // namespace

TEST_CASE("gen is deterministic and verify round-trips") {
    std::string f1 = tmp_path("cli_a.canon"), f2 = tmp_path("cli_b.canon");
    auto r1 = run("gen --n 2 --N 12 --kind random --colors 3 --seed 5 --out " + f1);
    auto r2 = run("gen --n 2 --N 12 --kind random --colors 3 --seed 5 --out " + f2);
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r2.exit_code == 0);
    std::ifstream a(f1), b(f2);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
    CHECK(!sa.str().empty());
}

TEST_CASE("verify exit codes") {
    std::string f = tmp_path("cli_canonical.canon");
    REQUIRE(run("gen --n 2 --N 16 --kind canonical --v 1 --out " + f).exit_code == 0);
    CHECK(run("verify --in " + f + " --subset 1,2,3,4 --v 1").exit_code == 0);
    CHECK(run("verify --in " + f + " --subset 1,2,3,4 --v 2").exit_code == 1);
    CHECK(run("verify --in " + f + " --subset 4,2 --v 1").exit_code == 64);  // bad subset
    CHECK(run("verify --in " + f).exit_code == 64);                          // missing flags
}

TEST_CASE("oracle finds witnesses and respects budgets") {
    std::string f = tmp_path("cli_oracle.canon");
    REQUIRE(run("gen --n 2 --N 10 --kind canonical --v 1,2 --out " + f).exit_code == 0);
    auto hit = run("oracle --in " + f + " --m 4");
    CHECK(hit.exit_code == 0);
    CHECK(hit.out.find("{1,2,3,4}") != std::string::npos);

    // the four-point two-value unary coloring has no canonical 3-subset
    std::string g = tmp_path("cli_unary.canon");
    std::ofstream out(g);
    out << "CANON v1 1 4\n1 0\n2 0\n3 1\n4 1\n";
    out.close();
    CHECK(run("oracle --in " + g + " --m 3").exit_code == 1);

    // a tiny budget refuses
    auto refused = run("oracle --in " + f + " --m 4 --budget 2");
    CHECK(refused.exit_code == 64);
    CHECK(run("oracle --in " + f + " --m 4 --budget 2 --force").exit_code == 0);
}

TEST_CASE("er-search certifies the tiny values") {
    auto ok = run("er-search --n 1 --m 3 --N 5");
    CHECK(ok.exit_code == 0);
    CHECK(ok.out.find("all") != std::string::npos);
    auto bad = run("er-search --n 1 --m 3 --N 4");
    CHECK(bad.exit_code == 1);
    CHECK(bad.out.find("counterexample") != std::string::npos);
    auto refused = run("er-search --n 2 --m 4 --N 8");
    CHECK(refused.exit_code == 64);
    CHECK(refused.out.find("Bell") != std::string::npos);
}

TEST_CASE("canonize, trace, and replay") {
    std::string f = tmp_path("cli_pipe.canon");
    std::string tr = tmp_path("cli_pipe_trace.json");
    REQUIRE(run("gen --n 2 --N 48 --kind canonical --v 1 --out " + f).exit_code == 0);
    auto done = run("canonize --in " + f + " --m 4 --seed 9 --trace " + tr);
    REQUIRE(done.exit_code == 0);
    CHECK(done.out.find("v = {1}") != std::string::npos);

    // trace parses and carries the stages
    std::ifstream tf(tr);
    auto j = nlohmann::json::parse(tf);
    CHECK(j["success"] == true);
    CHECK(j["stages"].size() >= 4);

    auto replay = run("replay --trace " + tr + " --in " + f);
    CHECK(replay.exit_code == 0);
    CHECK(replay.out.find("identical") != std::string::npos);

    // paper schedule on a desk-scale input fails with the threshold named:
    // m(1) = m3 = 2*(3*4^3)^2 = 73728 at n=2, m=4
    auto paper = run("canonize --in " + f + " --m 4 --schedule paper");
    CHECK(paper.exit_code == 2);
    CHECK(paper.out.find("m* = 73728") != std::string::npos);

    // custom schedule
    auto custom = run("canonize --in " + f + " --m 4 --schedule custom --sizes 40,20,8");
    CHECK(custom.exit_code == 0);
}

TEST_CASE("bound reports the worked schedule and parses as json") {
    auto text = run("bound --n 2 --m 2");
    REQUIRE(text.exit_code == 0);
    CHECK(text.out.find("m_1 = 24") != std::string::npos);
    CHECK(text.out.find("m_2 = 576") != std::string::npos);
    CHECK(text.out.find("m_3 = 1152") != std::string::npos);

    auto jr = run("bound --n 2 --m 2 --check-obs16 --table --m-hi 4 --format json");
    REQUIRE(jr.exit_code == 0);
    auto j = nlohmann::json::parse(jr.out);
    CHECK(j["schedule_18"]["m1"] == "24");
    CHECK(j["obs16"]["all_true"] == true);
    CHECK(j["schedule_17"]["growth_ok"] == true);
    CHECK(j["comparison_table"].size() == 3);
}

TEST_CASE("environment variable caps the oracle budget") {
    std::string f = tmp_path("cli_env.canon");
    REQUIRE(run("gen --n 2 --N 10 --kind constant --out " + f).exit_code == 0);
    std::string tmp = tmp_path("canon_cli_out.txt");
    std::string cmd = std::string("CANON_ORACLE_BUDGET=1 ") + CANON_CLI_PATH + " oracle --in " +
                      f + " --m 4 > " + tmp + " 2>&1";
    int rc = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(rc) == 64);
}
