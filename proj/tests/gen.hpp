#pragma once

#include <random>
#include <string>
#include <vector>

#include "wsl/encode.hpp"
#include "wsl/finite.hpp"
#include "wsl/frontend.hpp"
#include "wsl/sl.hpp"

namespace wsl::testgen {

inline const char* kListSid = R"(data node { node next; };

pred lseg(x, y) := x = y \/ exists u. x -> node{u} * lseg(u, y);
pred sll(x) := x = nil \/ exists u. x -> node{u} * sll(u);
)";

inline Problem list_problem() { return parse_problem(std::string(kListSid) + "checkentail emp |- emp;\n"); }

struct Gen {
    std::mt19937 rng;
    explicit Gen(unsigned seed) : rng(seed) {}
    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }
};

inline TermP loc_term(Gen& g, const std::vector<std::string>& consts) {
    int k = g.pick(int(consts.size()) + 1);
    return k == int(consts.size()) ? nil_term() : mk_const(consts[k], Sort::Loc);
}

// Quantifier-free conjunctive formula over lseg/sll and one-field points-to.
inline FormulaP random_qfc(Gen& g, const std::vector<std::string>& consts, int atoms) {
    std::vector<FormulaP> spatial, pure;
    for (int i = 0; i < atoms; ++i) {
        switch (g.pick(6)) {
            case 0: pure.push_back(mk_eq(loc_term(g, consts), loc_term(g, consts))); break;
            case 1: pure.push_back(mk_neq(loc_term(g, consts), loc_term(g, consts))); break;
            case 2: spatial.push_back(mk_pto(mk_const(consts[g.pick(int(consts.size()))], Sort::Loc), {loc_term(g, consts)})); break;
            case 3: spatial.push_back(mk_pred("lseg", {loc_term(g, consts), loc_term(g, consts)})); break;
            case 4: spatial.push_back(mk_pred("sll", {loc_term(g, consts)})); break;
            default: spatial.push_back(mk_emp()); break;
        }
    }
    std::vector<FormulaP> parts = spatial;
    parts.insert(parts.end(), pure.begin(), pure.end());
    if (parts.empty()) return mk_emp();
    if (parts.size() >= 2 && g.coin(0.25)) {
        // one classical conjunction between two separating blocks
        size_t cut = 1 + g.pick(int(parts.size()) - 1);
        std::vector<FormulaP> l(parts.begin(), parts.begin() + long(cut)), r(parts.begin() + long(cut), parts.end());
        auto side = [](std::vector<FormulaP> v) { return v.size() == 1 ? v[0] : mk_sep(v); };
        return mk_and({side(l), side(r)});
    }
    return parts.size() == 1 ? parts[0] : mk_sep(parts);
}

// Total heap over `nonnull` locations with constants placed at random.
inline HeapStructure random_heap(Gen& g, int nonnull, const std::vector<std::string>& consts) {
    HeapStructure m;
    m.num_locs = nonnull + 1;
    m.heap.assign(m.num_locs, {});
    for (int l = 1; l < m.num_locs; ++l) m.heap[l] = {loc(g.pick(m.num_locs))};
    for (auto& c : consts) m.consts[c] = loc(g.pick(m.num_locs));
    return m;
}

// Determined-heap interpretations of lseg/sll, each tuple absent or with one heaplet.
inline void random_preds(Gen& g, HeapStructure& m) {
    m.preds.clear();
    m.preds["sll"];
    m.preds["lseg"];
    Heaplet full = (Heaplet(1) << m.num_locs) - 2;
    auto heaplet = [&] {
        Heaplet h = 0;
        for (int l = 1; l < m.num_locs; ++l)
            if (g.coin(0.4)) h |= Heaplet(1) << l;
        return h & full;
    };
    for (int x = 0; x < m.num_locs; ++x) {
        if (g.coin(0.5)) m.preds["sll"].insert({{loc(x)}, heaplet()});
        for (int y = 0; y < m.num_locs; ++y)
            if (g.coin(0.5)) m.preds["lseg"].insert({{loc(x), loc(y)}, heaplet()});
    }
}

}  // namespace wsl::testgen

#include <chrono>

#include "wsl/normalize.hpp"
#include "wsl/solver.hpp"

namespace wsl::testgen {

// Reads a finite FO model back as a heap structure with null at location 0.
inline HeapStructure heap_of_model(const FOStructure& m, const std::vector<std::string>& preds) {
    long long nil = m.consts.at("nil").v;
    auto sw = [&](long long l) { return l == nil ? 0 : l == 0 ? nil : l; };
    HeapStructure h;
    h.num_locs = m.num_locs;
    h.heap.assign(m.num_locs, {});
    for (int l = 0; l < m.num_locs; ++l) {
        if (sw(l) == 0) continue;
        for (auto& f : m.funcs) h.heap[sw(l)].push_back(loc(sw(f[l].v)));
    }
    for (auto& [c, v] : m.consts)
        if (c != "nil") h.consts[c] = loc(sw(v.v));
    for (auto& p : preds) {
        auto& out = h.preds[p];
        auto fi = m.rels.find(p + "_fo");
        auto ei = m.rels.find(p + "_eta");
        if (fi == m.rels.end()) continue;
        for (auto& t : fi->second) {
            Heaplet eta = 0;
            std::vector<Value> args;
            for (auto& v : t) args.push_back(loc(sw(v.v)));
            for (int l = 0; l < m.num_locs; ++l) {
                auto k = t;
                k.push_back(loc(l));
                if (ei != m.rels.end() && ei->second.count(k) && sw(l) != 0) eta |= Heaplet(1) << sw(l);
            }
            out.insert({args, eta});
        }
    }
    return h;
}

struct AgreementStats {
    int cases = 0, with_axioms = 0, valid = 0, invalid = 0, inconclusive = 0, contradictions = 0;
    std::vector<std::string> failures;
};

inline std::vector<FoldUnfoldAxiom> random_axioms(Gen& g, const SID& sid, int n, int& fresh) {
    std::vector<FoldUnfoldAxiom> out;
    std::vector<std::string> consts{"a", "b"};
    for (int i = 0; i < n; ++i) {
        bool lseg = g.coin();
        auto& d = *sid.find(lseg ? "lseg" : "sll");
        std::vector<TermP> args;
        for (size_t k = 0; k < d.params.size(); ++k) args.push_back(loc_term(g, consts));
        if (g.coin()) {
            out.push_back(encode_fold_axiom(sid, d.name, args, {loc_term(g, consts)}));
        } else {
            out.push_back(encode_unfold_axiom(sid, d.name, args, {mk_const("_c" + std::to_string(fresh++), Sort::Loc)}));
        }
    }
    return out;
}

// One generated QF entailment decided by the bounded oracle and by the solver.
inline void agreement_case(Gen& g, const Problem& p, bool axioms, AgreementStats& st,
                           std::chrono::milliseconds timeout, int bound = 3) {
    std::vector<std::string> consts{"a", "b"};
    auto phi = random_qfc(g, consts, 1 + g.pick(3));
    auto psi = random_qfc(g, consts, 1 + g.pick(2));
    int fresh = 0;
    auto axs = axioms ? random_axioms(g, p.sid, 1 + g.pick(2), fresh) : std::vector<FoldUnfoldAxiom>{};
    std::vector<FormulaP> ax_sl;
    for (auto& a : axs) ax_sl.push_back(a.sl);
    std::string what = print(phi) + " |- " + print(psi);
    for (auto& a : ax_sl) what += " [" + print(a) + "]";

    ++st.cases;
    st.with_axioms += axioms;
    auto oracle = decide_qf_entailment({phi}, psi, bound, ax_sl, 1);

    NormalizedEntailment e;
    e.antecedent = phi;
    e.consequent_disjuncts = {psi};
    auto o = encode_entailment(e, p.sid, p.vocab, {false, true});
    add_axioms(o, axs);
    auto v = check(o, timeout, {}, nullptr, true);

    auto contradiction = [&](const std::string& why) {
        ++st.contradictions;
        st.failures.push_back(why + ": " + what);
    };
    if (v.kind == SolverVerdict::Unknown) {
        ++st.inconclusive;
        return;
    }
    if (v.kind == SolverVerdict::Unsat) {
        if (!oracle.valid) return contradiction("solver valid, oracle counter-model");
        ++st.valid;
        return;
    }
    if (!v.model) {
        ++st.inconclusive;
        return;
    }
    // A solver counter-model must be one under SL semantics.
    auto h = heap_of_model(*v.model, {"lseg", "sll"});
    Heaplet full = (Heaplet(1) << h.num_locs) - 2;
    Heaplet eta = 0;
    bool found = false;
    for (Heaplet x = 0; x <= full && !found; ++x) {
        if ((x & ~full) != 0) continue;
        if (satisfies(h, {}, x, phi) && !satisfies(h, {}, x, psi)) {
            eta = x;
            found = true;
        }
    }
    bool ax_ok = true;
    for (auto& a : ax_sl)
        for (Heaplet x = 0; x <= full && ax_ok; ++x)
            if ((x & ~full) == 0 && !satisfies(h, {}, x, a)) ax_ok = false;
    (void)eta;
    if (!found || !ax_ok) return contradiction("solver model is not an SL counter-model");
    if (oracle.valid) {
        if (h.num_locs <= bound + 1) return contradiction("oracle missed a small counter-model");
        ++st.inconclusive;
        return;
    }
    ++st.invalid;
}

}  // namespace wsl::testgen

namespace wsl::testgen {

struct CorrespondenceStats {
    int formulas = 0, satisfied = 0, fixpoints = 0, violations = 0;
    std::vector<std::string> failures;
};

// SL semantics on small determined-heap structures against the FO encoding:
// every satisfying heaplet is the encoded one, the FO translation holds iff the
// formula holds there, and fixpoints are exactly the models of the SID sentence.
inline CorrespondenceStats run_correspondence(int n, unsigned seed) {
    auto p = list_problem();
    auto sid_fo = encode_sid(p.sid);
    Gen g(seed);
    CorrespondenceStats st;
    for (int it = 0; it < n; ++it) {
        std::vector<std::string> consts = g.coin() ? std::vector<std::string>{"a", "b"} : std::vector<std::string>{"a", "b", "c"};
        auto m = random_heap(g, 1 + g.pick(3), consts);
        bool lfp = false;
        if (g.coin(0.4)) {
            auto l = lfp_interpret(m, p.sid);
            if (is_determined_heap(l)) {
                m = l;
                lfp = true;
            }
        }
        if (!lfp) random_preds(g, m);
        auto phi = random_qfc(g, consts, 1 + g.pick(4));
        auto enc = encode_uc(phi);
        auto mfo = to_fo(m, {Sort::Loc});
        auto h = heaplet_of(mfo, {}, enc.eta, kHeapletVar);
        auto fail = [&](const std::string& what) {
            ++st.violations;
            st.failures.push_back(what + ": " + print(phi));
        };
        Heaplet full = (Heaplet(1) << m.num_locs) - 2;
        for (Heaplet eta = 0; eta <= full; ++eta) {
            if ((eta & ~full) != 0) continue;
            if (satisfies(m, {}, eta, phi)) {
                ++st.satisfied;
                if (eta != h) fail("satisfying heaplet differs from the encoded heaplet");
            }
        }
        if (eval_fo(mfo, {}, enc.fo) != satisfies(m, {}, h, phi)) fail("FO translation disagrees with SL");
        bool fp = is_fixpoint(m, p.sid);
        if (fp != eval_fo(mfo, {}, sid_fo)) fail("fixpoint check disagrees with the SID sentence");
        if (lfp && !fp) fail("least fixpoint is not a fixpoint");
        st.fixpoints += fp;
        ++st.formulas;
    }
    return st;
}

}  // namespace wsl::testgen
