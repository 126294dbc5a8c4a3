#include <catch2/catch_amalgamated.hpp>

#include "gen.hpp"

using namespace wsl;

TEST_CASE("bounded oracle and solver agree on generated entailments") {
    auto p = testgen::list_problem();
    testgen::Gen g(7);
    testgen::AgreementStats st;
    for (int i = 0; i < 40; ++i) testgen::agreement_case(g, p, i % 2 == 1, st, std::chrono::milliseconds(10000));
    for (auto& f : st.failures) UNSCOPED_INFO(f);
    CHECK(st.contradictions == 0);
    CHECK(st.cases == 40);
    CHECK(st.valid >= 3);
    CHECK(st.invalid >= 3);
}

TEST_CASE("solver models read back as heap structures") {
    auto p = testgen::list_problem();
    NormalizedEntailment e;
    e.antecedent = mk_sep({mk_pto(mk_const("a", Sort::Loc), {mk_const("b", Sort::Loc)}), mk_pred("sll", {mk_const("b", Sort::Loc)})});
    e.consequent_disjuncts = {mk_pred("sll", {mk_const("a", Sort::Loc)})};
    auto o = encode_entailment(e, p.sid, p.vocab, {false, true});
    auto v = check(o, std::chrono::milliseconds(10000), {}, nullptr, true);
    REQUIRE(v.kind == SolverVerdict::Sat);
    REQUIRE(v.model);
    auto h = testgen::heap_of_model(*v.model, {"lseg", "sll"});
    CHECK(h.heap.at(h.consts.at("a").v).at(0) == h.consts.at("b"));
}

TEST_CASE("predicate heaplets never contain nil without the SID sentence") {
    auto p = testgen::list_problem();
    NormalizedEntailment e;
    e.antecedent = mk_sep({mk_pred("sll", {mk_const("a", Sort::Loc)}), mk_emp()});
    e.consequent_disjuncts = {mk_pred("sll", {mk_const("b", Sort::Loc)})};
    auto o = encode_entailment(e, p.sid, p.vocab, {false, true});
    auto v = check(o, std::chrono::milliseconds(10000), {}, nullptr, true);
    REQUIRE(v.kind == SolverVerdict::Sat);
    REQUIRE(v.model);
    auto h = testgen::heap_of_model(*v.model, {"lseg", "sll"});
    auto phi = e.antecedent, psi = e.consequent_disjuncts[0];
    bool counter = false;
    for (Heaplet x = 0; x < (Heaplet(1) << h.num_locs); x += 2) counter |= satisfies(h, {}, x, phi) && !satisfies(h, {}, x, psi);
    CHECK(counter);
}
