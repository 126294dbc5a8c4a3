#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "gen.hpp"
#include "wsl/encode.hpp"
#include "wsl/frontend.hpp"
#include "wsl/normalize.hpp"
#include "wsl/solver.hpp"

using namespace wsl;
using std::chrono::milliseconds;

namespace {

fo::Obligation obligation(const std::string& file, EncodeOptions opts = {}) {
    auto p = parse_problem_file(file);
    auto sk = skolemize(p.antecedents);
    auto es = split_entailment(sk, p.consequent);
    return encode_entailment(es.at(0), p.sid, p.vocab, opts);
}

}  // namespace

TEST_CASE("symbols needing quotes are quoted") {
    CHECK(smt_symbol("a") == "a");
    CHECK(smt_symbol("_sk0") == "|_sk0|");
    CHECK(smt_symbol("x'") == "|x'|");
    CHECK(smt_symbol("ray#1") == "|ray#1|");
}

TEST_CASE("obligations list only reachable predicates") {
    auto o = obligation(WSL_SOURCE_DIR "/tests/fixtures/archetypes/a1.sl");
    std::set<std::string> labels;
    for (auto& a : o.assertions) labels.insert(a.label);
    CHECK(labels == std::set<std::string>{"sid:lseg", "sid:sll", "antecedent", "refutation"});
    auto q = obligation(WSL_SOURCE_DIR "/corpus/sids/nll.sl");
    size_t sid = 0;
    for (auto& a : q.assertions) sid += a.tag == fo::Tag::Sid;
    CHECK(sid == 2);
    auto text = emit_smtlib(o);
    CHECK(text.find("(declare-sort Loc 0)") != std::string::npos);
    CHECK(text.find("; refutation refutation") != std::string::npos);
    CHECK(text.rfind("(check-sat)") != std::string::npos);
}

TEST_CASE("solver proves the unfolding entailments and not the inductive ones") {
    CHECK(check(obligation(WSL_SOURCE_DIR "/tests/fixtures/eq2.sl"), milliseconds(20000)).kind == SolverVerdict::Unsat);
    CHECK(check(obligation(WSL_SOURCE_DIR "/tests/fixtures/eq3.sl"), milliseconds(20000)).kind == SolverVerdict::Unsat);
    CHECK(check(obligation(WSL_SOURCE_DIR "/tests/fixtures/eq4.sl"), milliseconds(2000)).kind != SolverVerdict::Unsat);
}

TEST_CASE("zero timeout never spawns and a missing solver is reported") {
    auto o = obligation(WSL_SOURCE_DIR "/tests/fixtures/eq2.sl");
    auto v = check(o, milliseconds(0));
    CHECK(v.kind == SolverVerdict::Unknown);
    CHECK(v.reason == "timeout");
    SolverConfig bad;
    bad.path = "/nonexistent/solver";
    CHECK_THROWS_AS(check(o, milliseconds(1000), bad), SpawnError);
}

TEST_CASE("solver errors surface as exceptions") {
    CHECK_THROWS_AS(check_script("(assert undefined_symbol)\n(check-sat)\n", milliseconds(5000), {}), SolverOutputError);
}

TEST_CASE("unsat cores point at assertions") {
    auto o = obligation(WSL_SOURCE_DIR "/tests/fixtures/eq3.sl", {false, true});
    auto p = parse_problem_file(WSL_SOURCE_DIR "/tests/fixtures/eq3.sl");
    size_t base = o.assertions.size();
    add_axioms(o, {encode_unfold_axiom(p.sid, "lseg", {mk_const("b", Sort::Loc), mk_const("a", Sort::Loc)}, {mk_const("_c0", Sort::Loc)}),
                   encode_fold_axiom(p.sid, "lseg", {mk_const("a", Sort::Loc), mk_const("b", Sort::Loc)}, {mk_const("c", Sort::Loc)})});
    auto v = check(o, milliseconds(20000), {}, nullptr, false, true);
    REQUIRE(v.kind == SolverVerdict::Unsat);
    REQUIRE(v.core);
    CHECK(std::find(v.core->begin(), v.core->end(), base + 1) != v.core->end());
    CHECK(std::find(v.core->begin(), v.core->end(), base) == v.core->end());
}

TEST_CASE("integer get-value answers parse with negatives") {
    auto m = parse_int_values("((p0 3) (|p1| (- 2)) (p2 0))");
    CHECK(m.at("p0") == 3);
    CHECK(m.at("p1") == -2);
    CHECK(m.at("p2") == 0);
}

TEST_CASE("queries are written to the dump directory") {
    auto dir = std::filesystem::temp_directory_path() / "wsl-dump-test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    SolverConfig cfg;
    cfg.dump_dir = dir.string();
    check(obligation(WSL_SOURCE_DIR "/tests/fixtures/eq2.sl"), milliseconds(20000), cfg);
    size_t n = 0;
    for (auto& e : std::filesystem::directory_iterator(dir)) n += e.path().extension() == ".smt2";
    CHECK(n == 1);
    std::filesystem::remove_all(dir);
}
