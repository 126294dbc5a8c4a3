#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "wsl/pipeline.hpp"

using namespace wsl;
namespace fs = std::filesystem;
using std::chrono::milliseconds;

TEST_CASE("check races prover and refuter") {
    CheckOptions o;
    o.timeout = milliseconds(30000);
    auto v = run_check(parse_problem_file(WSL_SOURCE_DIR "/tests/fixtures/eq3.sl"), o);
    CHECK(v.outcome == Outcome::Valid);
    CHECK(v.engine == "prover");
    CHECK(!v.certificate);
    auto r = run_check(parse_problem_file(WSL_SOURCE_DIR "/tests/fixtures/eq5.sl"), o);
    REQUIRE(r.outcome == Outcome::Refuted);
    REQUIRE(r.certificate);
    CHECK(r.certificate->symbolic);
    CHECK(!r.certificate->infinite_nodes.empty());
    for (auto& a : r.certificate->verdicts) CHECK(a.holds);
}

TEST_CASE("single-engine modes") {
    CheckOptions o;
    o.timeout = milliseconds(3000);
    o.refuter = false;
    CHECK(run_check(parse_problem_file(WSL_SOURCE_DIR "/tests/fixtures/eq4.sl"), o).outcome == Outcome::Unknown);
    o.timeout = milliseconds(20000);
    o.refuter = true;
    o.prover = false;
    CHECK(run_check(parse_problem_file(WSL_SOURCE_DIR "/tests/fixtures/eq2.sl"), o).outcome != Outcome::Refuted);
    CHECK(run_check(parse_problem_file(WSL_SOURCE_DIR "/tests/fixtures/eq4.sl"), o).outcome == Outcome::Refuted);
}

TEST_CASE("exit codes") {
    CHECK(exit_code(Outcome::Valid) == 0);
    CHECK(exit_code(Outcome::Refuted) == 10);
    CHECK(exit_code(Outcome::Unknown) == 20);
}

TEST_CASE("bench tabulates a manifest") {
    auto dir = fs::temp_directory_path() / "wsl-bench-test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    fs::copy_file(WSL_SOURCE_DIR "/tests/fixtures/eq3.sl", dir / "eq3.sl");
    fs::copy_file(WSL_SOURCE_DIR "/tests/fixtures/eq4.sl", dir / "eq4.sl");
    std::ofstream(dir / "manifest.csv") << "file,category,expected\neq3.sl,lists,valid\neq4.sl,lists,valid\n";
    CheckOptions o;
    o.timeout = milliseconds(20000);
    auto r = run_bench(dir.string(), o);
    REQUIRE(r.entries.size() == 2);
    CHECK(r.entries[0].outcome == Outcome::Valid);
    CHECK(r.entries[1].outcome == Outcome::Refuted);
    CHECK(r.contradictions() == 1);
    CHECK(r.conclusive() == 2);
    CHECK(bench_csv(r) == "category,# Examples,# Valid,# Counter-model,# Timeout\nlists,2,1,1,0\ntotal,2,1,1,0\n");
    CHECK(bench_table(r).find("# Counter-model") != std::string::npos);
    fs::remove_all(dir);
}

namespace {

int run(const std::string& args) {
    int rc = std::system((std::string(WSL_CLI) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("command line exit codes") {
    std::string fx = WSL_SOURCE_DIR "/tests/fixtures/";
    CHECK(run("check " + fx + "eq2.sl") == 0);
    CHECK(run("--json check " + fx + "eq4.sl") == 10);
    CHECK(run("--timeout 2 prove-wsl " + fx + "eq4.sl") == 20);
    CHECK(run("fold-unfold " + fx + "eq3.sl --budget 1") == 0);
    CHECK(run("validate-model " + fx + "fig1b.json " + fx + "eq5.sl") == 10);
    CHECK(run("validate-model " + fx + "fig1b.json " + fx + "eq2.sl") == 20);
    CHECK(run("check /nonexistent.sl") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("check") == 2);
}
