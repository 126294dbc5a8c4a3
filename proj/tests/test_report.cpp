#include <catch2/catch_amalgamated.hpp>

#include "gen.hpp"
#include "json.hpp"
#include "wsl/normalize.hpp"
#include "wsl/report.hpp"

using namespace wsl;

namespace {

struct Loaded {
    Problem p;
    fo::Obligation o;
};

Loaded load(const std::string& file) {
    auto p = parse_problem_file(file);
    auto sk = skolemize(p.antecedents);
    auto es = split_entailment(sk, p.consequent);
    auto o = encode_entailment(es.at(0), p.sid, p.vocab);
    return {p, o};
}

}  // namespace

TEST_CASE("archetype fixtures certify and classify") {
    for (int a = 1; a <= 6; ++a) {
        std::string base = WSL_SOURCE_DIR "/tests/fixtures/archetypes/a" + std::to_string(a);
        INFO(base);
        auto s = sym::load_structure(base + ".json");
        REQUIRE(sym::validate_structure(s).verdict);
        auto l = load(base + ".sl");
        auto c = report::certify(s, l.o, &l.p.sid);
        CHECK(c.rogue);
        CHECK(!c.infinite_nodes.empty());
        CHECK(c.infinite_nodes.size() == (a == 3 || a == 6 ? 2u : 1u));
        CHECK(c.archetype == a);
        CHECK(!c.boundary);
    }
}

TEST_CASE("the list-with-detached-segment structure is archetype 2") {
    auto s = sym::load_structure(WSL_SOURCE_DIR "/tests/fixtures/fig1b.json");
    CHECK(report::classify_archetype(s) == 2);
}

TEST_CASE("certification fails on the wrong obligation") {
    auto s = sym::load_structure(WSL_SOURCE_DIR "/tests/fixtures/fig1b.json");
    auto l = load(WSL_SOURCE_DIR "/tests/fixtures/eq2.sl");
    try {
        report::certify(s, l.o, &l.p.sid);
        FAIL("expected certification failure");
    } catch (const report::CertificationError& e) {
        bool antecedent_fails = false;
        for (auto& v : e.verdicts) antecedent_fails |= v.tag == fo::Tag::Antecedent && !v.holds;
        CHECK(antecedent_fails);
    }
}

TEST_CASE("finite models are compared with the least fixpoint") {
    auto l = load(WSL_SOURCE_DIR "/corpus/mini/slrd-lm/lseg-wrong.sl");
    // a -> b -> null; lseg(a, b) holds, lseg(b, a) does not
    HeapStructure h;
    h.num_locs = 3;
    h.heap = {{}, {loc(2)}, {loc(0)}};
    h.consts = {{"a", loc(1)}, {"b", loc(2)}};
    auto lfp = lfp_interpret(h, l.p.sid);
    REQUIRE(is_determined_heap(lfp));
    auto m = to_fo(lfp, {Sort::Loc});
    auto c = report::certify(m, {"null", "a", "b"}, l.o, &l.p.sid);
    CHECK(!c.rogue);
    CHECK(c.rogue_note.find("least fixpoint") != std::string::npos);

    // Every interpretation is a fixpoint of P(x, y) := P(x, y); the least one is empty.
    auto p2 = parse_problem("data node { node next; };\npred P(x, y) := P(x, y);\ncheckentail P(a, b) |- a = b;\n");
    auto sk = skolemize(p2.antecedents);
    auto o2 = encode_entailment(split_entailment(sk, p2.consequent).at(0), p2.sid, p2.vocab);
    HeapStructure two;
    two.num_locs = 3;
    two.heap = {{}, {loc(0)}, {loc(0)}};
    two.consts = {{"a", loc(1)}, {"b", loc(2)}};
    two.preds["P"] = {{{loc(1), loc(2)}, 0}};
    REQUIRE(is_fixpoint(two, p2.sid));
    auto c2 = report::certify(to_fo(two, {Sort::Loc}), {"null", "a", "b"}, o2, &p2.sid);
    CHECK(c2.rogue);
}

TEST_CASE("explication of all-singleton structures") {
    auto s = sym::load_structure(WSL_SOURCE_DIR "/tests/fixtures/fig1b.json");
    std::vector<std::string> names;
    CHECK(!report::explicate_finite(s, &names));
    auto f = s;
    int r = sym::node_index(s, "r");
    f.nodes[r].bound = sym::parse_lia_formula("(= i 0)");
    f.funcs[0][r] = {r, fo::lit(0)};
    auto m = report::explicate_finite(f, &names);
    REQUIRE(m);
    CHECK(m->num_locs == 5);
    CHECK(names[r] == "r");
    CHECK(m->funcs[0][r] == loc(r));
    // (r, r, r) entry: i1 <= i3 < i2 is false at i = 0
    CHECK(!m->rels.at("lseg_eta").count({loc(r), loc(r), loc(r)}));
    CHECK(m->rels.at("lseg_fo").count({loc(r), loc(r)}));
}

TEST_CASE("certificates render as JSON, DOT and text") {
    auto s = sym::load_structure(WSL_SOURCE_DIR "/tests/fixtures/fig1b.json");
    auto l = load(WSL_SOURCE_DIR "/tests/fixtures/eq4.sl");
    auto c = report::certify(s, l.o, &l.p.sid);
    auto j = nlohmann::json::parse(report::render_json(c));
    CHECK(j["kind"] == "symbolic");
    CHECK(j["rogue"] == true);
    CHECK(j["infinite_nodes"] == nlohmann::json::array({"r"}));
    CHECK(j["archetype"] == 2);
    CHECK(sym::to_json(sym::from_json(j["model"].dump())) == sym::to_json(s));
    CHECK(report::render_dot(c).find("doublecircle") != std::string::npos);
    CHECK(report::render_text(c).find("archetype: 2") != std::string::npos);
}
