#include <catch2/catch_amalgamated.hpp>

#include "gen.hpp"
#include "wsl/finite.hpp"

using namespace wsl;

namespace {

Heaplet hb(std::initializer_list<int> ls) {
    Heaplet h = 0;
    for (int l : ls) h |= Heaplet(1) << l;
    return h;
}

HeapStructure chain() {
    // a = 1 -> 2 -> null
    HeapStructure m;
    m.num_locs = 3;
    m.heap = {{}, {loc(2)}, {loc(0)}};
    m.consts = {{"a", loc(1)}, {"b", loc(2)}};
    return m;
}

}  // namespace

TEST_CASE("least fixpoint of list predicates on a two-cell chain") {
    auto p = testgen::list_problem();
    auto l = lfp_interpret(chain(), p.sid);
    using T = std::set<std::pair<std::vector<Value>, Heaplet>>;
    CHECK(l.preds["sll"] == T{{{loc(0)}, 0}, {{loc(1)}, hb({1, 2})}, {{loc(2)}, hb({2})}});
    CHECK(l.preds["lseg"] == T{{{loc(0), loc(0)}, 0},
                               {{loc(1), loc(1)}, 0},
                               {{loc(2), loc(2)}, 0},
                               {{loc(1), loc(2)}, hb({1})},
                               {{loc(1), loc(0)}, hb({1, 2})},
                               {{loc(2), loc(0)}, hb({2})}});
    CHECK(is_fixpoint(l, p.sid));
    CHECK(is_determined_heap(l));
}

TEST_CASE("cyclic heaps give non-determined lseg interpretations") {
    auto p = testgen::list_problem();
    HeapStructure m;
    m.num_locs = 2;
    m.heap = {{}, {loc(1)}};
    auto l = lfp_interpret(m, p.sid);
    CHECK(l.preds["lseg"].count({{loc(1), loc(1)}, 0}));
    CHECK(l.preds["lseg"].count({{loc(1), loc(1)}, hb({1})}));
    CHECK(!is_determined_heap(l));
    CHECK(l.preds["sll"].count({{loc(1)}, hb({1})}) == 0);
}

TEST_CASE("removing a tuple from the least fixpoint breaks the fixpoint property") {
    auto p = testgen::list_problem();
    auto l = lfp_interpret(chain(), p.sid);
    l.preds["sll"].erase({{loc(2)}, hb({2})});
    CHECK(!is_fixpoint(l, p.sid));
}

TEST_CASE("SL satisfaction of points-to, separation and predicates") {
    auto p = testgen::list_problem();
    auto m = lfp_interpret(chain(), p.sid);
    auto a = mk_const("a", Sort::Loc), b = mk_const("b", Sort::Loc);
    auto f = mk_sep({mk_pto(a, {b}), mk_pred("sll", {b})});
    CHECK(satisfies(m, {}, hb({1, 2}), f));
    CHECK(!satisfies(m, {}, hb({1}), f));
    CHECK(satisfies(m, {}, hb({1}), mk_pto(a, {b})));
    CHECK(!satisfies(m, {}, hb({1}), mk_pto(a, {nil_term()})));
    CHECK(satisfies(m, {}, 0, mk_emp()));
    CHECK(satisfies(m, {}, 0, mk_neq(a, b)));
    CHECK(!satisfies(m, {}, hb({1}), mk_neq(a, b)));
}

TEST_CASE("bounded oracle decides textbook entailments") {
    auto a = mk_const("a", Sort::Loc), b = mk_const("b", Sort::Loc);
    // predicates are uninterpreted: only propositional structure matters
    auto r1 = decide_qf_entailment({mk_sep({mk_pto(a, {b}), mk_pred("sll", {b})})}, mk_sep({mk_pred("sll", {b}), mk_pto(a, {b})}), 3);
    CHECK(r1.valid);
    auto r2 = decide_qf_entailment({mk_pred("sll", {a})}, mk_pred("sll", {b}), 2);
    CHECK(!r2.valid);
    auto r3 = decide_qf_entailment({mk_pto(a, {b})}, mk_neq(a, nil_term()), 2);
    CHECK(!r3.valid);  // heaplet of the consequent is empty
    auto r4 = decide_qf_entailment({mk_sep({mk_pto(a, {b}), mk_pto(b, {a})})}, mk_sep({mk_pto(b, {a}), mk_pto(a, {b})}), 3);
    CHECK(r4.valid);
}
