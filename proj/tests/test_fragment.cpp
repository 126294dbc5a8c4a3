#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "wsl/frontend.hpp"
#include "wsl/pipeline.hpp"

using namespace wsl;

TEST_CASE("heap-reducing classifier matches the SID corpus labels") {
    std::ifstream in(WSL_SOURCE_DIR "/corpus/sids/manifest.csv");
    REQUIRE(in);
    std::string line;
    std::getline(in, line);
    size_t n = 0, t = 0, f = 0;
    while (std::getline(in, line)) {
        auto comma = line.find(',');
        auto file = line.substr(0, comma);
        bool expected = line.substr(comma + 1) == "true";
        auto p = parse_problem_file(WSL_SOURCE_DIR "/corpus/sids/" + file);
        INFO(file);
        CHECK(check_heap_reducing(p.sid).verdict == expected);
        ++n;
        (expected ? t : f)++;
    }
    CHECK(n >= 10);
    CHECK(t >= 5);
    CHECK(f >= 1);
}

TEST_CASE("fragment checks reject non-EDH input with a diagnostic") {
    auto p = parse_problem(
        "data node { node next; };\n"
        "pred lseg(x, y) := x = y \\/ exists u. x -> node{u} * lseg(u, y);\n"
        "checkentail lseg(a, b) |- forall u. lseg(a, u) \\/ exists v. a = v;\n");
    CHECK_THROWS_AS(check_fragment(p), DiagnosticError);
    auto q = parse_problem_file(WSL_SOURCE_DIR "/tests/fixtures/eq4.sl");
    CHECK_NOTHROW(check_fragment(q));
}

TEST_CASE("reachable predicates follow SID cases") {
    auto p = parse_problem_file(WSL_SOURCE_DIR "/corpus/sids/nll.sl");
    CHECK(reachable_preds(p.sid, {"nll"}) == std::set<std::string>{"nll", "sll2"});
    CHECK(reachable_preds(p.sid, {"sll2"}) == std::set<std::string>{"sll2"});
}
