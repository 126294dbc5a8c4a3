#include <catch2/catch_amalgamated.hpp>

#include "wsl/sexpr.hpp"

using namespace wsl;

TEST_CASE("sexpr reads nested lists, quoted symbols and comments") {
    auto v = parse_sexprs("sat ; note\n(model (define-fun |_sk0| () Loc Loc!val!1))");
    REQUIRE(v.size() == 2);
    CHECK(v[0].is("sat"));
    CHECK(v[1][1][1].is("_sk0"));
    CHECK(v[1][1].str() == "(define-fun _sk0 () Loc Loc!val!1)");
}

TEST_CASE("sexpr rejects unbalanced input") {
    CHECK_THROWS_AS(parse_sexpr("(a (b)"), SExprError);
    CHECK_THROWS_AS(parse_sexpr(")"), SExprError);
    CHECK_THROWS_AS(parse_sexpr("a b"), SExprError);
}
