#include <catch2/catch_amalgamated.hpp>

#include "json.hpp"
#include "wsl/foldunfold.hpp"

using namespace wsl;

TEST_CASE("unfolding proves the existential-consequent entailment with one axiom") {
    auto p = parse_problem_file(WSL_SOURCE_DIR "/tests/fixtures/eq2.sl");
    FoldUnfoldOptions o;
    o.budget = 2;
    auto r = fold_unfold(p, o);
    REQUIRE(r.kind == FoldUnfoldResult::Proved);
    REQUIRE(r.proof.axioms.size() == 1);
    CHECK(r.proof.axioms[0].axiom.kind == FoldUnfoldAxiom::Unfold);
    CHECK(r.proof.axioms[0].axiom.pred == "lseg");
    auto j = nlohmann::json::parse(proof_to_json(r.proof));
    CHECK(j["axioms"][0]["kind"] == "unfold");
    // The recorded axiom re-parses in surface syntax.
    auto text = std::string("data node { node next; };\npred lseg(x, y) := x = y \\/ exists u. x -> node{u} * lseg(u, y);\n") +
                "checkentail " + j["axioms"][0]["formula"].get<std::string>() + " |- emp;\n";
    CHECK_NOTHROW(parse_problem(text, true));
}

TEST_CASE("folding proves the cons entailment with one axiom") {
    auto p = parse_problem_file(WSL_SOURCE_DIR "/tests/fixtures/eq3.sl");
    FoldUnfoldOptions o;
    o.budget = 2;
    auto r = fold_unfold(p, o);
    REQUIRE(r.kind == FoldUnfoldResult::Proved);
    REQUIRE(r.proof.axioms.size() == 1);
    CHECK(r.proof.axioms[0].axiom.kind == FoldUnfoldAxiom::Fold);
}

TEST_CASE("inductive entailments exhaust the budget") {
    auto p = parse_problem_file(WSL_SOURCE_DIR "/tests/fixtures/eq4.sl");
    FoldUnfoldOptions o;
    o.budget = 2;
    auto r = fold_unfold(p, o);
    CHECK(r.kind == FoldUnfoldResult::Exhausted);
    CHECK(r.axioms_tried > 0);
}

TEST_CASE("zero budget proves nothing that needs axioms") {
    auto p = parse_problem_file(WSL_SOURCE_DIR "/tests/fixtures/eq2.sl");
    FoldUnfoldOptions o;
    o.budget = 0;
    CHECK(fold_unfold(p, o).kind == FoldUnfoldResult::Exhausted);
}

TEST_CASE("minimized proofs stay proofs") {
    auto p = parse_problem_file(WSL_SOURCE_DIR "/corpus/mini/slrd-valid/tree-fold.sl");
    FoldUnfoldOptions o;
    o.budget = 2;
    auto r = fold_unfold(p, o);
    REQUIRE(r.kind == FoldUnfoldResult::Proved);
    CHECK(r.proof.axioms.size() <= 2);
    o.minimize = false;
    auto full = fold_unfold(p, o);
    REQUIRE(full.kind == FoldUnfoldResult::Proved);
    CHECK(full.proof.axioms.size() >= r.proof.axioms.size());
}
