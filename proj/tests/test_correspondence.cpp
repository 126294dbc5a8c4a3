#include <catch2/catch_amalgamated.hpp>

#include "gen.hpp"

using namespace wsl;

TEST_CASE("encoding corresponds to SL semantics on small determined-heap structures") {
    for (unsigned seed : {20240611u, 17u}) {
        auto st = testgen::run_correspondence(250, seed);
        for (auto& f : st.failures) UNSCOPED_INFO(f);
        CHECK(st.violations == 0);
        CHECK(st.formulas == 250);
        CHECK(st.satisfied >= 30);
        CHECK(st.fixpoints >= 30);
    }
}

TEST_CASE("a perturbed least fixpoint is rejected by both fixpoint checks") {
    auto p = testgen::list_problem();
    auto sid_fo = encode_sid(p.sid);
    testgen::Gen g(5);
    int tried = 0;
    for (int it = 0; it < 200 && tried < 40; ++it) {
        auto m = testgen::random_heap(g, 1 + g.pick(3), {"a"});
        auto l = lfp_interpret(m, p.sid);
        if (!is_determined_heap(l) || l.preds["sll"].empty()) continue;
        l.preds["sll"].erase(l.preds["sll"].begin());
        CHECK(!is_fixpoint(l, p.sid));
        CHECK(!eval_fo(to_fo(l, {Sort::Loc}), {}, sid_fo));
        ++tried;
    }
    CHECK(tried >= 20);
}
