#include "wsl/sl.hpp"

#include <functional>
#include <stdexcept>

namespace wsl {

const char* sort_name(Sort s) { return s == Sort::Loc ? "loc" : "int"; }

TermP mk_const(const std::string& name, Sort s) {
    return std::make_shared<Term>(Term{Term::Const, s, name, 0, {}});
}
TermP mk_var(const std::string& name, Sort s) {
    return std::make_shared<Term>(Term{Term::Var, s, name, 0, {}});
}
TermP mk_lit(long long v) { return std::make_shared<Term>(Term{Term::Lit, Sort::Int, "", v, {}}); }
TermP mk_add(TermP a, TermP b) {
    return std::make_shared<Term>(Term{Term::Add, Sort::Int, "", 0, {std::move(a), std::move(b)}});
}
TermP mk_field(int index, TermP t, Sort s) {
    return std::make_shared<Term>(Term{Term::Field, s, "", index, {std::move(t)}});
}
TermP nil_term() {
    static const TermP nil = mk_const("nil", Sort::Loc);
    return nil;
}

bool term_equal(const TermP& a, const TermP& b) {
    if (a == b) return true;
    if (a->kind != b->kind || a->sort != b->sort || a->name != b->name || a->value != b->value ||
        a->args.size() != b->args.size())
        return false;
    for (size_t i = 0; i < a->args.size(); ++i)
        if (!term_equal(a->args[i], b->args[i])) return false;
    return true;
}

bool term_less(const TermP& a, const TermP& b) {
    if (a->kind != b->kind) return a->kind < b->kind;
    if (a->name != b->name) return a->name < b->name;
    if (a->value != b->value) return a->value < b->value;
    if (a->sort != b->sort) return a->sort < b->sort;
    if (a->args.size() != b->args.size()) return a->args.size() < b->args.size();
    for (size_t i = 0; i < a->args.size(); ++i) {
        if (term_less(a->args[i], b->args[i])) return true;
        if (term_less(b->args[i], a->args[i])) return false;
    }
    return false;
}

static FormulaP atom(Formula::Kind k, std::vector<TermP> ts) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->terms = std::move(ts);
    return f;
}

FormulaP mk_eq(TermP a, TermP b) { return atom(Formula::Eq, {std::move(a), std::move(b)}); }
FormulaP mk_neq(TermP a, TermP b) { return atom(Formula::Neq, {std::move(a), std::move(b)}); }
FormulaP mk_lt(TermP a, TermP b) { return atom(Formula::Lt, {std::move(a), std::move(b)}); }
FormulaP mk_not_lt(TermP a, TermP b) { return atom(Formula::NotLt, {std::move(a), std::move(b)}); }
FormulaP mk_emp() { return atom(Formula::Emp, {}); }
FormulaP mk_pto(TermP root, std::vector<TermP> fields) {
    fields.insert(fields.begin(), std::move(root));
    return atom(Formula::PointsTo, std::move(fields));
}
FormulaP mk_pred(const std::string& p, std::vector<TermP> args) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Pred;
    f->pred = p;
    f->terms = std::move(args);
    return f;
}

FormulaP mk_nary(Formula::Kind k, std::vector<FormulaP> kids) {
    if (kids.size() == 1) return kids[0];
    std::vector<FormulaP> flat;
    for (auto& c : kids) {
        if (c->kind == k)
            flat.insert(flat.end(), c->kids.begin(), c->kids.end());
        else
            flat.push_back(c);
    }
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->kids = std::move(flat);
    return f;
}
FormulaP mk_or(std::vector<FormulaP> kids) { return mk_nary(Formula::Or, std::move(kids)); }
FormulaP mk_and(std::vector<FormulaP> kids) { return mk_nary(Formula::And, std::move(kids)); }
FormulaP mk_sep(std::vector<FormulaP> kids) {
    if (kids.empty()) return mk_emp();
    return mk_nary(Formula::Sep, std::move(kids));
}

FormulaP mk_quant(Formula::Kind k, std::vector<VarDecl> vars, FormulaP body) {
    if (vars.empty()) return body;
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->vars = std::move(vars);
    f->kids = {std::move(body)};
    return f;
}
FormulaP mk_exists(std::vector<VarDecl> vars, FormulaP body) {
    return mk_quant(Formula::Exists, std::move(vars), std::move(body));
}
FormulaP mk_forall(std::vector<VarDecl> vars, FormulaP body) {
    return mk_quant(Formula::Forall, std::move(vars), std::move(body));
}
FormulaP mk_implies(FormulaP a, FormulaP b) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Implies;
    f->kids = {std::move(a), std::move(b)};
    return f;
}

bool is_atom(const FormulaP& f) { return f->kind <= Formula::Pred; }
bool is_pure_atom(const FormulaP& f) { return f->kind <= Formula::NotLt; }

bool formula_equal(const FormulaP& a, const FormulaP& b) {
    if (a == b) return true;
    if (a->kind != b->kind || a->pred != b->pred || a->terms.size() != b->terms.size() ||
        a->kids.size() != b->kids.size() || a->vars != b->vars)
        return false;
    for (size_t i = 0; i < a->terms.size(); ++i)
        if (!term_equal(a->terms[i], b->terms[i])) return false;
    for (size_t i = 0; i < a->kids.size(); ++i)
        if (!formula_equal(a->kids[i], b->kids[i])) return false;
    return true;
}

namespace {

void collect_term_vars(const TermP& t, std::set<std::string>& out) {
    if (t->kind == Term::Var) out.insert(t->name);
    for (auto& a : t->args) collect_term_vars(a, out);
}

void collect_free(const FormulaP& f, std::set<std::string>& bound, std::set<std::string>& out) {
    for (auto& t : f->terms) {
        std::set<std::string> vs;
        collect_term_vars(t, vs);
        for (auto& v : vs)
            if (!bound.count(v)) out.insert(v);
    }
    if (f->kind == Formula::Exists || f->kind == Formula::Forall) {
        std::vector<std::string> added;
        for (auto& v : f->vars)
            if (bound.insert(v.name).second) added.push_back(v.name);
        collect_free(f->kids[0], bound, out);
        for (auto& v : added) bound.erase(v);
        return;
    }
    for (auto& k : f->kids) collect_free(k, bound, out);
}

void collect_consts(const TermP& t, std::map<std::string, Sort>& out) {
    if (t->kind == Term::Const) out.emplace(t->name, t->sort);
    for (auto& a : t->args) collect_consts(a, out);
}

void walk(const FormulaP& f, const std::function<void(const FormulaP&)>& fn) {
    fn(f);
    for (auto& k : f->kids) walk(k, fn);
}

}  // namespace

std::set<std::string> term_vars(const TermP& t) {
    std::set<std::string> out;
    collect_term_vars(t, out);
    return out;
}

std::set<std::string> free_vars(const FormulaP& f) {
    std::set<std::string> bound, out;
    collect_free(f, bound, out);
    return out;
}

std::map<std::string, Sort> typed_constants_of(const FormulaP& f) {
    std::map<std::string, Sort> out;
    walk(f, [&](const FormulaP& g) {
        for (auto& t : g->terms) collect_consts(t, out);
    });
    return out;
}

std::set<std::string> constants_of(const FormulaP& f) {
    std::set<std::string> out;
    for (auto& [k, s] : typed_constants_of(f)) out.insert(k);
    return out;
}

std::set<std::string> preds_of(const FormulaP& f) {
    std::set<std::string> out;
    walk(f, [&](const FormulaP& g) {
        if (g->kind == Formula::Pred) out.insert(g->pred);
    });
    return out;
}

TermP subst_term(const TermP& t, const Subst& s) {
    if (t->kind == Term::Var) {
        auto it = s.find(t->name);
        return it == s.end() ? t : it->second;
    }
    if (t->args.empty()) return t;
    auto r = std::make_shared<Term>(*t);
    bool changed = false;
    for (auto& a : r->args) {
        auto b = subst_term(a, s);
        changed |= (b != a);
        a = b;
    }
    return changed ? r : t;
}

namespace {

void all_names(const FormulaP& f, std::set<std::string>& out) {
    for (auto& t : f->terms) collect_term_vars(t, out);
    for (auto& v : f->vars) out.insert(v.name);
    for (auto& k : f->kids) all_names(k, out);
}

}  // namespace

FormulaP subst(const FormulaP& f, const Subst& s) {
    if (s.empty()) return f;
    if (f->kind == Formula::Exists || f->kind == Formula::Forall) {
        Subst inner = s;
        for (auto& v : f->vars) inner.erase(v.name);
        auto body_free = free_vars(f->kids[0]);
        std::set<std::string> range_vars;
        for (auto& [x, t] : inner)
            if (body_free.count(x)) collect_term_vars(t, range_vars);
        std::vector<VarDecl> vars = f->vars;
        std::set<std::string> used;
        all_names(f, used);
        used.insert(range_vars.begin(), range_vars.end());
        for (auto& [x, t] : inner) used.insert(x);
        for (auto& v : vars) {
            if (!range_vars.count(v.name)) continue;
            std::string fresh;
            for (int n = 1;; ++n) {
                fresh = v.name + "_" + std::to_string(n);
                if (!used.count(fresh)) break;
            }
            used.insert(fresh);
            inner[v.name] = mk_var(fresh, v.sort);
            v.name = fresh;
        }
        if (inner.empty()) return f;
        return mk_quant(f->kind, vars, subst(f->kids[0], inner));
    }
    auto r = std::make_shared<Formula>(*f);
    for (auto& t : r->terms) t = subst_term(t, s);
    for (auto& k : r->kids) k = subst(k, s);
    return r;
}

bool alpha_equal(const FormulaP& a, const FormulaP& b) {
    if (a->kind != b->kind) return false;
    if (a->kind == Formula::Exists || a->kind == Formula::Forall) {
        if (a->vars.size() != b->vars.size()) return false;
        Subst sa, sb;
        for (size_t i = 0; i < a->vars.size(); ++i) {
            if (a->vars[i].sort != b->vars[i].sort) return false;
            auto fresh = mk_var("#" + std::to_string(i) + "#" + a->vars[i].name + "#" + b->vars[i].name,
                                a->vars[i].sort);
            sa[a->vars[i].name] = fresh;
            sb[b->vars[i].name] = fresh;
        }
        return alpha_equal(subst(a->kids[0], sa), subst(b->kids[0], sb));
    }
    if (a->pred != b->pred || a->terms.size() != b->terms.size() || a->kids.size() != b->kids.size())
        return false;
    for (size_t i = 0; i < a->terms.size(); ++i)
        if (!term_equal(a->terms[i], b->terms[i])) return false;
    for (size_t i = 0; i < a->kids.size(); ++i)
        if (!alpha_equal(a->kids[i], b->kids[i])) return false;
    return true;
}

bool has_theory(const FormulaP& f) {
    bool found = false;
    std::function<void(const TermP&)> tv = [&](const TermP& t) {
        if (t->sort == Sort::Int || t->kind == Term::Lit || t->kind == Term::Add) found = true;
        for (auto& a : t->args) tv(a);
    };
    walk(f, [&](const FormulaP& g) {
        if (g->kind == Formula::Lt || g->kind == Formula::NotLt) found = true;
        for (auto& v : g->vars)
            if (v.sort == Sort::Int) found = true;
        for (auto& t : g->terms) tv(t);
    });
    return found;
}

bool is_quantifier_free(const FormulaP& f) {
    bool ok = true;
    walk(f, [&](const FormulaP& g) {
        if (g->kind == Formula::Exists || g->kind == Formula::Forall) ok = false;
    });
    return ok;
}

bool is_conjunctive(const FormulaP& f) {
    bool ok = true;
    walk(f, [&](const FormulaP& g) {
        if (g->kind == Formula::Or || g->kind == Formula::Implies) ok = false;
    });
    return ok;
}

bool is_qf_conjunctive(const FormulaP& f) { return is_quantifier_free(f) && is_conjunctive(f); }

bool is_universal_conjunctive(const FormulaP& f) {
    bool ok = true;
    walk(f, [&](const FormulaP& g) {
        if (g->kind == Formula::Or || g->kind == Formula::Implies || g->kind == Formula::Exists) ok = false;
    });
    return ok;
}

std::vector<FormulaP> sep_conjuncts(const FormulaP& f) {
    if (f->kind != Formula::Sep) return {f};
    std::vector<FormulaP> out;
    for (auto& k : f->kids) {
        auto sub = sep_conjuncts(k);
        out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
}

const PredDef* SID::find(const std::string& name) const {
    for (auto& d : defs)
        if (d.name == name) return &d;
    return nullptr;
}

// ---- fragment checks --------------------------------------------------------

namespace {

const char* kind_word(Formula::Kind k) {
    switch (k) {
        case Formula::Or: return "or";
        case Formula::And: return "and";
        case Formula::Sep: return "sep";
        case Formula::Exists: return "exists";
        case Formula::Forall: return "forall";
        case Formula::Implies: return "implies";
        default: return "atom";
    }
}

// Path to the first node violating QF-conjunctiveness, empty if none.
std::optional<std::string> qfc_violation(const FormulaP& f, const std::string& path) {
    if (f->kind == Formula::Or || f->kind == Formula::Implies || f->kind == Formula::Exists ||
        f->kind == Formula::Forall)
        return path + "/" + kind_word(f->kind);
    for (size_t i = 0; i < f->kids.size(); ++i) {
        auto r = qfc_violation(f->kids[i], path + "/" + kind_word(f->kind) + "[" + std::to_string(i) + "]");
        if (r) return r;
    }
    return std::nullopt;
}

}  // namespace

FragmentReport check_edh(const FormulaP& f) {
    FragmentReport r;
    r.category = "EDH";
    FormulaP g = f;
    std::string path;
    while (g->kind == Formula::Exists) {
        path += "/exists";
        g = g->kids[0];
    }
    std::vector<FormulaP> blocks = g->kind == Formula::Or ? g->kids : std::vector<FormulaP>{g};
    for (size_t i = 0; i < blocks.size(); ++i) {
        FormulaP b = blocks[i];
        std::string bp = path + (g->kind == Formula::Or ? "/or[" + std::to_string(i) + "]" : "");
        while (b->kind == Formula::Forall) {
            bp += "/forall";
            b = b->kids[0];
        }
        if (auto v = qfc_violation(b, bp)) {
            r.verdict = false;
            r.witness = *v;
            return r;
        }
    }
    return r;
}

FragmentReport check_sid(const SID& sid) {
    FragmentReport r;
    r.category = "well-formed-SID";
    for (auto& d : sid.defs) {
        std::set<std::string> scope;
        for (auto& v : d.params) scope.insert(v.name);
        for (auto& v : d.exists) scope.insert(v.name);
        for (size_t j = 0; j < d.cases.size(); ++j) {
            std::string where = "pred " + d.name + " case " + std::to_string(j + 1);
            if (auto v = qfc_violation(d.cases[j], "")) {
                r.verdict = false;
                r.witness = where + ": " + v->substr(1);
                return r;
            }
            for (auto& x : free_vars(d.cases[j])) {
                if (!scope.count(x)) {
                    r.verdict = false;
                    r.witness = where + ": free variable " + x;
                    return r;
                }
            }
            std::optional<std::string> bad;
            walk(d.cases[j], [&](const FormulaP& g) {
                if (bad || g->kind != Formula::Pred) return;
                auto* callee = sid.find(g->pred);
                if (!callee)
                    bad = "undeclared predicate " + g->pred;
                else if (callee->params.size() != g->terms.size())
                    bad = "arity mismatch for " + g->pred;
            });
            if (bad) {
                r.verdict = false;
                r.witness = where + ": " + *bad;
                return r;
            }
        }
    }
    return r;
}

FragmentReport check_heap_reducing(const SID& sid) {
    FragmentReport r;
    r.category = "heap-reducing";
    for (auto& d : sid.defs) {
        for (size_t j = 0; j < d.cases.size(); ++j) {
            if (preds_of(d.cases[j]).empty()) continue;
            bool has_pto = false;
            for (auto& c : sep_conjuncts(d.cases[j]))
                if (c->kind == Formula::PointsTo) has_pto = true;
            if (!has_pto) {
                r.verdict = false;
                r.witness = "pred " + d.name + " case " + std::to_string(j + 1) +
                            ": recursive case without a top-level points-to";
                return r;
            }
        }
    }
    return r;
}

std::set<std::string> reachable_preds(const SID& sid, const std::set<std::string>& roots) {
    std::set<std::string> seen;
    std::vector<std::string> work(roots.begin(), roots.end());
    while (!work.empty()) {
        auto p = work.back();
        work.pop_back();
        if (!seen.insert(p).second) continue;
        if (auto* d = sid.find(p))
            for (auto& c : d->cases)
                for (auto& q : preds_of(c)) work.push_back(q);
    }
    return seen;
}

}  // namespace wsl
