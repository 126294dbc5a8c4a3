#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "wsl/frontend.hpp"

using namespace wsl;
namespace fs = std::filesystem;

TEST_CASE("frontend parses the list fixtures") {
    auto p = parse_problem_file(WSL_SOURCE_DIR "/tests/fixtures/eq2.sl");
    REQUIRE(p.sid.defs.size() == 1);
    CHECK(p.sid.defs[0].name == "lseg");
    CHECK(p.sid.defs[0].cases.size() == 2);
    CHECK(p.vocab.record_shape == std::vector<Sort>{Sort::Loc});
    CHECK(p.antecedents.size() == 1);
    CHECK(p.consequent->kind == Formula::Exists);
    CHECK(p.program_constants.count("a"));
    CHECK(p.program_constants.count("b"));
}

TEST_CASE("frontend infers int sorts from comparisons") {
    auto p = parse_problem_file(WSL_SOURCE_DIR "/corpus/mini/slrd-lm-int/sorted-weaken.sl");
    CHECK(p.vocab.record_shape == std::vector<Sort>{Sort::Loc, Sort::Int});
    CHECK(p.program_constants.at("j") == Sort::Int);
    CHECK(p.program_constants.at("a") == Sort::Loc);
    CHECK(p.vocab.preds.at("slseg").params == std::vector<Sort>{Sort::Loc, Sort::Loc, Sort::Int});
}

TEST_CASE("printing and reparsing is the identity on every bundled problem") {
    size_t n = 0;
    for (auto& dir : {"/corpus/mini", "/corpus/sids", "/tests/fixtures"})
        for (auto& e : fs::recursive_directory_iterator(std::string(WSL_SOURCE_DIR) + dir)) {
            if (e.path().extension() != ".sl") continue;
            auto p = parse_problem_file(e.path().string());
            auto q = parse_problem(print(p));
            INFO(e.path().string());
            CHECK(problem_equal(p, q));
            ++n;
        }
    CHECK(n >= 40);
}

TEST_CASE("frontend reports positions of errors") {
    try {
        parse_problem("data node { node next; };\npred p(x) := q(x);\ncheckentail p(a) |- p(a);\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
        CHECK(std::string(e.what()).find("undeclared predicate q") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_problem("data node { node next; };\ncheckentail a -> node{b} |- "), ParseError);
    CHECK_THROWS_AS(parse_problem("checkentail _x = nil |- emp;"), ParseError);
}
