#include "wsl/encode.hpp"

#include <stdexcept>

#include "wsl/frontend.hpp"

namespace wsl {

fo::TermP encode_term(const TermP& t) {
    switch (t->kind) {
        case Term::Const: return t->name == "nil" ? fo::nil() : fo::cnst(t->name, t->sort);
        case Term::Var: return fo::var(t->name, t->sort);
        case Term::Lit: return fo::lit(t->value);
        case Term::Add: return fo::add(encode_term(t->args[0]), encode_term(t->args[1]));
        case Term::Field: return fo::app(fo::field_fn(int(t->value)), encode_term(t->args[0]), t->sort);
    }
    throw std::logic_error("bad term");
}

namespace {

fo::TermP xs() { return fo::var(kHeapletVar, Sort::Loc); }
const VarDecl xs_decl{kHeapletVar, Sort::Loc};

struct UcEncoder {
    int fresh = 0;

    EncodedFormula enc(const FormulaP& f) {
        using fo::conj;
        switch (f->kind) {
            case Formula::Eq: return {fo::eq(encode_term(f->terms[0]), encode_term(f->terms[1])), fo::bot()};
            case Formula::Neq: return {fo::neq(encode_term(f->terms[0]), encode_term(f->terms[1])), fo::bot()};
            case Formula::Lt: return {fo::lt(encode_term(f->terms[0]), encode_term(f->terms[1])), fo::bot()};
            case Formula::NotLt:
                return {fo::neg(fo::lt(encode_term(f->terms[0]), encode_term(f->terms[1]))), fo::bot()};
            case Formula::Emp: return {fo::top(), fo::bot()};
            case Formula::Pred: {
                std::vector<fo::TermP> args;
                for (auto& t : f->terms) args.push_back(encode_term(t));
                auto eargs = args;
                eargs.push_back(xs());
                return {fo::rel(fo::fo_rel(f->pred), args), fo::rel(fo::eta_rel(f->pred), eargs)};
            }
            case Formula::PointsTo: {
                auto root = encode_term(f->terms[0]);
                std::vector<fo::FormulaP> cs{fo::neq(root, fo::nil())};
                for (size_t i = 1; i < f->terms.size(); ++i)
                    cs.push_back(fo::eq(encode_term(f->terms[i]),
                                        fo::app(fo::field_fn(int(i)), root, f->terms[i]->sort)));
                return {conj(cs), fo::eq(xs(), root)};
            }
            case Formula::And: {
                auto first = enc(f->kids[0]);
                std::vector<fo::FormulaP> cs{first.fo};
                for (size_t i = 1; i < f->kids.size(); ++i) {
                    auto k = enc(f->kids[i]);
                    cs.push_back(k.fo);
                    cs.push_back(fo::forall({xs_decl}, fo::iff(first.eta, k.eta)));
                }
                return {conj(cs), first.eta};
            }
            case Formula::Sep: {
                auto acc = enc(f->kids[0]);
                std::vector<fo::FormulaP> cs{acc.fo};
                fo::FormulaP eta = acc.eta;
                for (size_t i = 1; i < f->kids.size(); ++i) {
                    auto k = enc(f->kids[i]);
                    cs.push_back(k.fo);
                    cs.push_back(fo::neg(fo::exists({xs_decl}, fo::conj({eta, k.eta}))));
                    eta = fo::disj({eta, k.eta});
                }
                return {conj(cs), eta};
            }
            case Formula::Forall: {
                auto body = enc(f->kids[0]);
                fo::FormulaP fo_part = body.fo;
                fo::FormulaP eta = body.eta;
                for (auto it = f->vars.rbegin(); it != f->vars.rend(); ++it) {
                    std::string x1 = "_q" + std::to_string(++fresh);
                    std::string x2 = "_q" + std::to_string(++fresh);
                    auto a = fo::subst(eta, {{it->name, fo::var(x1, it->sort)}});
                    auto b = fo::subst(eta, {{it->name, fo::var(x2, it->sort)}});
                    auto indep = fo::forall({{x1, it->sort}, {x2, it->sort}, xs_decl}, fo::iff(a, b));
                    fo_part = fo::conj({fo::forall({*it}, fo_part), indep});
                    fo::TermP dflt = it->sort == Sort::Loc ? fo::nil() : fo::lit(0);
                    eta = fo::subst(eta, {{it->name, dflt}});
                }
                return {fo_part, eta};
            }
            default: throw std::invalid_argument("encode_uc: formula is not universal-conjunctive");
        }
    }
};

std::vector<VarDecl> used_exists(const PredDef& d, const FormulaP& c) {
    auto fv = free_vars(c);
    std::vector<VarDecl> out;
    for (auto& v : d.exists)
        if (fv.count(v.name)) out.push_back(v);
    return out;
}

std::vector<fo::TermP> fo_vars(const std::vector<VarDecl>& vs) {
    std::vector<fo::TermP> out;
    for (auto& v : vs) out.push_back(fo::var(v.name, v.sort));
    return out;
}

}  // namespace

EncodedFormula encode_uc(const FormulaP& phi) {
    if (!is_universal_conjunctive(phi)) throw std::invalid_argument("encode_uc: formula is not universal-conjunctive");
    UcEncoder e;
    return e.enc(phi);
}

std::vector<fo::FormulaP> encode_sid_parts(const SID& sid, const std::set<std::string>& only) {
    std::vector<fo::FormulaP> out;
    for (auto& d : sid.defs) {
        if (!only.empty() && !only.count(d.name)) continue;
        auto xv = fo_vars(d.params);
        auto xe = xv;
        xe.push_back(xs());
        std::vector<fo::FormulaP> fo_cases, eta_parts;
        for (auto& c : d.cases) {
            auto e = encode_uc(c);
            auto ys = used_exists(d, c);
            fo_cases.push_back(fo::exists(ys, e.fo));
            eta_parts.push_back(
                fo::forall(ys, fo::implies(e.fo, fo::forall({xs_decl}, fo::iff(fo::rel(fo::eta_rel(d.name), xe), e.eta)))));
        }
        auto body = fo::conj({fo::iff(fo::rel(fo::fo_rel(d.name), xv), fo::disj(fo_cases)), fo::conj(eta_parts)});
        out.push_back(fo::forall(d.params, body));
    }
    return out;
}

fo::FormulaP encode_sid(const SID& sid) { return fo::conj(encode_sid_parts(sid)); }

fo::Signature make_signature(const Vocabulary& vocab, const SID& sid) {
    fo::Signature sig;
    sig.fields = vocab.record_shape;
    sig.constants = vocab.constants;
    sig.constants["nil"] = Sort::Loc;
    for (auto& d : sid.defs) {
        std::vector<Sort> ps;
        for (auto& p : d.params) ps.push_back(p.sort);
        sig.relations[fo::fo_rel(d.name)] = ps;
        ps.push_back(Sort::Loc);
        sig.relations[fo::eta_rel(d.name)] = ps;
    }
    return sig;
}

namespace {

void add_constants(fo::Signature& sig, const FormulaP& f) {
    for (auto& [c, s] : typed_constants_of(f)) sig.constants.emplace(c, s);
}

bool sig_has_int(const fo::Signature& sig) {
    for (auto s : sig.fields)
        if (s == Sort::Int) return true;
    for (auto& [c, s] : sig.constants)
        if (s == Sort::Int) return true;
    for (auto& [r, ps] : sig.relations)
        for (auto s : ps)
            if (s == Sort::Int) return true;
    return false;
}

}  // namespace

fo::Obligation encode_entailment(const NormalizedEntailment& e, const SID& sid0, const Vocabulary& vocab,
                                 const EncodeOptions& opts) {
    SID sid = opts.inline_points_to ? inline_sid(sid0) : sid0;
    std::vector<VarDecl> us = e.consequent_exists;
    std::vector<FormulaP> disjuncts = e.consequent_disjuncts;
    if (opts.inline_points_to && !us.empty()) {
        auto q = inline_points_to_existentials(mk_exists(us, mk_or(disjuncts)));
        us.clear();
        while (q->kind == Formula::Exists) {
            us.insert(us.end(), q->vars.begin(), q->vars.end());
            q = q->kids[0];
        }
        disjuncts = q->kind == Formula::Or ? q->kids : std::vector<FormulaP>{q};
    }

    fo::Obligation o;
    o.sig = make_signature(vocab, sid);
    for (auto& [k, s] : e.skolems) o.sig.constants[k] = s;
    add_constants(o.sig, e.antecedent);
    for (auto& d : disjuncts) add_constants(o.sig, d);

    std::set<std::string> roots = preds_of(e.antecedent);
    for (auto& d : disjuncts)
        for (auto& p : preds_of(d)) roots.insert(p);

    if (opts.include_sid) {
        auto reach = reachable_preds(sid, roots);
        for (auto& d : sid.defs) {
            if (!reach.count(d.name)) continue;
            auto parts = encode_sid_parts(sid, {d.name});
            for (auto& p : parts) o.assertions.push_back({p, fo::Tag::Sid, "sid:" + d.name});
        }
    } else {
        // Without the SID sentence nothing keeps nil out of predicate heaplets.
        for (auto& d : sid.defs) {
            if (!roots.count(d.name)) continue;
            std::vector<VarDecl> ys;
            std::vector<fo::TermP> args;
            for (size_t i = 0; i < d.params.size(); ++i) {
                ys.push_back({"?y" + std::to_string(i), d.params[i].sort});
                args.push_back(fo::var(ys.back().name, ys.back().sort));
            }
            args.push_back(fo::nil());
            o.assertions.push_back({fo::forall(ys, fo::neg(fo::rel(fo::eta_rel(d.name), args))), fo::Tag::Axiom,
                                    "heaplet:" + d.name});
        }
    }
    auto phi = encode_uc(e.antecedent);
    o.assertions.push_back({phi.fo, fo::Tag::Antecedent, "antecedent"});
    std::vector<fo::FormulaP> clauses;
    for (auto& d : disjuncts) {
        auto psi = encode_uc(d);
        clauses.push_back(fo::implies(fo::forall({xs_decl}, fo::iff(phi.eta, psi.eta)), fo::neg(psi.fo)));
    }
    o.assertions.push_back({fo::forall(us, fo::conj(clauses)), fo::Tag::Refutation, "refutation"});
    bool int_quant = false;
    for (auto& a : o.assertions) int_quant |= fo::mentions_int_quantifier(a.formula);
    o.has_theory = int_quant || sig_has_int(o.sig);
    return o;
}

// ---- fold / unfold ----------------------------------------------------------

namespace {

const PredDef& lookup(const SID& sid, const std::string& pred) {
    auto* d = sid.find(pred);
    if (!d) throw std::invalid_argument("unknown predicate " + pred);
    return *d;
}

Subst binding(const PredDef& d, const std::vector<TermP>& args, const std::vector<TermP>& ws) {
    if (args.size() != d.params.size()) throw std::invalid_argument("arity mismatch for " + d.name);
    if (ws.size() != d.exists.size())
        throw std::invalid_argument("witness count mismatch for " + d.name + ": expected " +
                                    std::to_string(d.exists.size()));
    Subst s;
    for (size_t i = 0; i < args.size(); ++i) s[d.params[i].name] = args[i];
    for (size_t i = 0; i < ws.size(); ++i) s[d.exists[i].name] = ws[i];
    return s;
}

fo::FormulaP eta_equation(const std::string& pred, const std::vector<TermP>& args, const fo::FormulaP& eta) {
    std::vector<fo::TermP> ea;
    for (auto& a : args) ea.push_back(encode_term(a));
    ea.push_back(xs());
    return fo::forall({xs_decl}, fo::iff(fo::rel(fo::eta_rel(pred), ea), eta));
}

fo::FormulaP fo_atom(const std::string& pred, const std::vector<TermP>& args) {
    std::vector<fo::TermP> fa;
    for (auto& a : args) fa.push_back(encode_term(a));
    return fo::rel(fo::fo_rel(pred), fa);
}

}  // namespace

FoldUnfoldAxiom encode_fold_axiom(const SID& sid, const std::string& pred, const std::vector<TermP>& args,
                                  const std::vector<TermP>& witnesses) {
    auto& d = lookup(sid, pred);
    auto s = binding(d, args, witnesses);
    FoldUnfoldAxiom ax{FoldUnfoldAxiom::Fold, pred, args, witnesses, {}, nullptr, nullptr};
    std::vector<FormulaP> sl;
    std::vector<fo::FormulaP> fo_parts;
    for (auto& c : d.cases) {
        auto rc = subst(c, s);
        sl.push_back(mk_implies(rc, mk_pred(pred, args)));
        auto e = encode_uc(rc);
        fo_parts.push_back(fo::implies(e.fo, fo::conj({fo_atom(pred, args), eta_equation(pred, args, e.eta)})));
    }
    ax.sl = sl.size() == 1 ? sl[0] : mk_and(sl);
    ax.fo = fo::conj(fo_parts);
    return ax;
}

FoldUnfoldAxiom encode_unfold_axiom(const SID& sid, const std::string& pred, const std::vector<TermP>& args,
                                    const std::vector<TermP>& fresh) {
    auto& d = lookup(sid, pred);
    auto s = binding(d, args, fresh);
    FoldUnfoldAxiom ax{FoldUnfoldAxiom::Unfold, pred, args, fresh, {}, nullptr, nullptr};
    for (auto& c : fresh)
        if (c->kind == Term::Const) ax.fresh_constants[c->name] = c->sort;
    std::vector<FormulaP> cases;
    std::vector<fo::FormulaP> fo_cases;
    for (auto& c : d.cases) {
        auto rc = subst(c, s);
        cases.push_back(rc);
        auto e = encode_uc(rc);
        fo_cases.push_back(fo::conj({e.fo, eta_equation(pred, args, e.eta)}));
    }
    ax.sl = mk_implies(mk_pred(pred, args), cases.size() == 1 ? cases[0] : mk_or(cases));
    ax.fo = fo::implies(fo_atom(pred, args), fo::disj(fo_cases));
    return ax;
}

void add_axioms(fo::Obligation& o, const std::vector<FoldUnfoldAxiom>& axioms) {
    for (auto& ax : axioms) {
        for (auto& [c, s] : ax.fresh_constants) o.sig.constants[c] = s;
        if (ax.sl) add_constants(o.sig, ax.sl);
        o.assertions.push_back({ax.fo, fo::Tag::Axiom, ax.sl ? print(ax.sl) : "true"});
    }
}

// ---- ∃-points-to inlining ---------------------------------------------------

namespace {

// Finds t↦⟨…u…⟩ among the conjuncts of f (not under quantifiers) with u ∈ us and t free of us.
std::optional<std::pair<std::string, TermP>> find_inlinable(const FormulaP& f, const std::set<std::string>& us) {
    if (f->kind == Formula::PointsTo) {
        for (auto& v : term_vars(f->terms[0]))
            if (us.count(v)) return std::nullopt;
        for (size_t i = 1; i < f->terms.size(); ++i) {
            auto& t = f->terms[i];
            if (t->kind == Term::Var && us.count(t->name))
                return std::make_pair(t->name, mk_field(int(i), f->terms[0], t->sort));
        }
        return std::nullopt;
    }
    if (f->kind == Formula::Sep || f->kind == Formula::And) {
        for (auto& k : f->kids)
            if (auto r = find_inlinable(k, us)) return r;
    }
    return std::nullopt;
}

FormulaP inline_in(FormulaP f, std::set<std::string>& us) {
    while (auto r = find_inlinable(f, us)) {
        f = subst(f, {{r->first, r->second}});
        us.erase(r->first);
    }
    return f;
}

}  // namespace

FormulaP inline_points_to_existentials(const FormulaP& phi) {
    if (phi->kind != Formula::Exists) return phi;
    std::vector<VarDecl> vars;
    FormulaP body = phi;
    while (body->kind == Formula::Exists) {
        vars.insert(vars.end(), body->vars.begin(), body->vars.end());
        body = body->kids[0];
    }
    std::vector<FormulaP> ds = body->kind == Formula::Or ? body->kids : std::vector<FormulaP>{body};
    std::set<std::string> remaining;
    for (auto& d : ds) {
        std::set<std::string> us;
        for (auto& v : vars) us.insert(v.name);
        d = inline_in(d, us);
        remaining.insert(us.begin(), us.end());
    }
    std::vector<VarDecl> kept;
    for (auto& v : vars)
        if (remaining.count(v.name)) kept.push_back(v);
    return mk_exists(kept, ds.size() == 1 ? ds[0] : mk_or(ds));
}

SID inline_sid(const SID& sid) {
    SID out = sid;
    for (auto& d : out.defs) {
        std::set<std::string> remaining;
        for (auto& c : d.cases) {
            std::set<std::string> us;
            for (auto& v : used_exists(d, c)) us.insert(v.name);
            c = inline_in(c, us);
            remaining.insert(us.begin(), us.end());
        }
        std::vector<VarDecl> kept;
        for (auto& v : d.exists)
            if (remaining.count(v.name)) kept.push_back(v);
        d.exists = kept;
    }
    return out;
}

}  // namespace wsl
