#include "wsl/fo.hpp"

#include <atomic>
#include <functional>

namespace wsl::fo {

TermP cnst(const std::string& name, Sort s) { return std::make_shared<Term>(Term{Term::Const, s, name, 0, {}}); }
TermP var(const std::string& name, Sort s) { return std::make_shared<Term>(Term{Term::Var, s, name, 0, {}}); }
TermP lit(long long v) { return std::make_shared<Term>(Term{Term::Lit, Sort::Int, "", v, {}}); }
TermP add(TermP a, TermP b) {
    if (a->kind == Term::Lit && b->kind == Term::Lit) return lit(a->value + b->value);
    if (b->kind == Term::Lit && b->value == 0) return a;
    if (a->kind == Term::Lit && a->value == 0) return b;
    return std::make_shared<Term>(Term{Term::Add, Sort::Int, "", 0, {std::move(a), std::move(b)}});
}
TermP app(const std::string& fn, TermP arg, Sort result) {
    return std::make_shared<Term>(Term{Term::App, result, fn, 0, {std::move(arg)}});
}
TermP nil() {
    static const TermP n = cnst("nil", Sort::Loc);
    return n;
}

bool term_equal(const TermP& a, const TermP& b) {
    if (a == b) return true;
    if (a->kind != b->kind || a->name != b->name || a->value != b->value || a->args.size() != b->args.size())
        return false;
    for (size_t i = 0; i < a->args.size(); ++i)
        if (!term_equal(a->args[i], b->args[i])) return false;
    return true;
}

namespace {

std::shared_ptr<Formula> make(Formula::Kind k) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    return f;
}

void term_vars(const TermP& t, std::set<std::string>& out) {
    if (t->kind == Term::Var) out.insert(t->name);
    for (auto& a : t->args) term_vars(a, out);
}

}  // namespace

FormulaP top() {
    static const FormulaP t = make(Formula::True);
    return t;
}
FormulaP bot() {
    static const FormulaP f = make(Formula::False);
    return f;
}

FormulaP eq(TermP a, TermP b) {
    if (term_equal(a, b)) return top();
    if (a->kind == Term::Lit && b->kind == Term::Lit) return a->value == b->value ? top() : bot();
    auto f = make(Formula::Eq);
    f->terms = {std::move(a), std::move(b)};
    return f;
}
FormulaP neq(TermP a, TermP b) { return neg(eq(std::move(a), std::move(b))); }
FormulaP lt(TermP a, TermP b) {
    if (a->kind == Term::Lit && b->kind == Term::Lit) return a->value < b->value ? top() : bot();
    if (term_equal(a, b)) return bot();
    auto f = make(Formula::Lt);
    f->terms = {std::move(a), std::move(b)};
    return f;
}
FormulaP le(TermP a, TermP b) { return neg(lt(std::move(b), std::move(a))); }
FormulaP rel(const std::string& name, std::vector<TermP> args) {
    auto f = make(Formula::Rel);
    f->name = name;
    f->terms = std::move(args);
    return f;
}
FormulaP neg(FormulaP a) {
    if (a->kind == Formula::True) return bot();
    if (a->kind == Formula::False) return top();
    if (a->kind == Formula::Not) return a->kids[0];
    auto f = make(Formula::Not);
    f->kids = {std::move(a)};
    return f;
}

static FormulaP nary(Formula::Kind k, std::vector<FormulaP> ks) {
    Formula::Kind unit = k == Formula::And ? Formula::True : Formula::False;
    Formula::Kind zero = k == Formula::And ? Formula::False : Formula::True;
    std::vector<FormulaP> out;
    for (auto& c : ks) {
        if (c->kind == unit) continue;
        if (c->kind == zero) return c;
        if (c->kind == k)
            out.insert(out.end(), c->kids.begin(), c->kids.end());
        else
            out.push_back(c);
    }
    if (out.empty()) return k == Formula::And ? top() : bot();
    if (out.size() == 1) return out[0];
    auto f = make(k);
    f->kids = std::move(out);
    return f;
}
FormulaP conj(std::vector<FormulaP> ks) { return nary(Formula::And, std::move(ks)); }
FormulaP disj(std::vector<FormulaP> ks) { return nary(Formula::Or, std::move(ks)); }

FormulaP implies(FormulaP a, FormulaP b) {
    if (a->kind == Formula::False || b->kind == Formula::True) return top();
    if (a->kind == Formula::True) return b;
    if (b->kind == Formula::False) return neg(a);
    auto f = make(Formula::Implies);
    f->kids = {std::move(a), std::move(b)};
    return f;
}
FormulaP iff(FormulaP a, FormulaP b) {
    if (a->kind == Formula::True) return b;
    if (b->kind == Formula::True) return a;
    if (a->kind == Formula::False) return neg(b);
    if (b->kind == Formula::False) return neg(a);
    if (formula_equal(a, b)) return top();
    auto f = make(Formula::Iff);
    f->kids = {std::move(a), std::move(b)};
    return f;
}

static FormulaP quant(Formula::Kind k, std::vector<VarDecl> vs, FormulaP body) {
    if (body->kind == Formula::True || body->kind == Formula::False) return body;
    auto fv = free_vars(body);
    std::vector<VarDecl> kept;
    for (auto& v : vs)
        if (fv.count(v.name)) kept.push_back(v);
    if (kept.empty()) return body;
    if (body->kind == k) {
        kept.insert(kept.end(), body->vars.begin(), body->vars.end());
        body = body->kids[0];
    }
    auto f = make(k);
    f->vars = std::move(kept);
    f->kids = {std::move(body)};
    return f;
}
FormulaP forall(std::vector<VarDecl> vs, FormulaP body) { return quant(Formula::Forall, std::move(vs), std::move(body)); }
FormulaP exists(std::vector<VarDecl> vs, FormulaP body) { return quant(Formula::Exists, std::move(vs), std::move(body)); }

bool formula_equal(const FormulaP& a, const FormulaP& b) {
    if (a == b) return true;
    if (a->kind != b->kind || a->name != b->name || a->terms.size() != b->terms.size() ||
        a->kids.size() != b->kids.size() || a->vars != b->vars)
        return false;
    for (size_t i = 0; i < a->terms.size(); ++i)
        if (!term_equal(a->terms[i], b->terms[i])) return false;
    for (size_t i = 0; i < a->kids.size(); ++i)
        if (!formula_equal(a->kids[i], b->kids[i])) return false;
    return true;
}

std::set<std::string> free_vars(const FormulaP& f) {
    std::set<std::string> out;
    for (auto& t : f->terms) term_vars(t, out);
    for (auto& k : f->kids) {
        auto s = free_vars(k);
        out.insert(s.begin(), s.end());
    }
    for (auto& v : f->vars) out.erase(v.name);
    return out;
}

TermP subst_term(const TermP& t, const Subst& s) {
    if (t->kind == Term::Var) {
        auto it = s.find(t->name);
        return it == s.end() ? t : it->second;
    }
    if (t->args.empty()) return t;
    if (t->kind == Term::Add) return add(subst_term(t->args[0], s), subst_term(t->args[1], s));
    return app(t->name, subst_term(t->args[0], s), t->sort);
}

static std::atomic<int> fresh_counter{0};

FormulaP subst(const FormulaP& f, const Subst& s) {
    if (s.empty()) return f;
    switch (f->kind) {
        case Formula::True:
        case Formula::False: return f;
        case Formula::Eq: return eq(subst_term(f->terms[0], s), subst_term(f->terms[1], s));
        case Formula::Lt: return lt(subst_term(f->terms[0], s), subst_term(f->terms[1], s));
        case Formula::Rel: {
            std::vector<TermP> ts;
            for (auto& t : f->terms) ts.push_back(subst_term(t, s));
            return rel(f->name, ts);
        }
        case Formula::Not: return neg(subst(f->kids[0], s));
        case Formula::And:
        case Formula::Or: {
            std::vector<FormulaP> ks;
            for (auto& k : f->kids) ks.push_back(subst(k, s));
            return f->kind == Formula::And ? conj(ks) : disj(ks);
        }
        case Formula::Implies: return implies(subst(f->kids[0], s), subst(f->kids[1], s));
        case Formula::Iff: return iff(subst(f->kids[0], s), subst(f->kids[1], s));
        case Formula::Forall:
        case Formula::Exists: {
            Subst inner = s;
            for (auto& v : f->vars) inner.erase(v.name);
            auto body_fv = free_vars(f->kids[0]);
            std::set<std::string> range;
            for (auto& [x, t] : inner)
                if (body_fv.count(x)) term_vars(t, range);
            std::vector<VarDecl> vs = f->vars;
            for (auto& v : vs) {
                if (!range.count(v.name)) continue;
                std::string fresh = "_r" + std::to_string(++fresh_counter);
                inner[v.name] = var(fresh, v.sort);
                v.name = fresh;
            }
            auto body = subst(f->kids[0], inner);
            return f->kind == Formula::Forall ? forall(vs, body) : exists(vs, body);
        }
    }
    return f;
}

bool mentions_int_quantifier(const FormulaP& f) {
    for (auto& v : f->vars)
        if (v.sort == Sort::Int) return true;
    for (auto& k : f->kids)
        if (mentions_int_quantifier(k)) return true;
    return false;
}

namespace {

std::string sym(const std::string& n) {
    if (!n.empty() && (n[0] == '_' || n.find('\'') != std::string::npos || n.find('#') != std::string::npos))
        return "|" + n + "|";
    return n;
}

}  // namespace

namespace {

std::string term_str(const TermP& t, const std::string& vp) {
    switch (t->kind) {
        case Term::Const: return sym(t->name);
        case Term::Var: return sym(vp + t->name);
        case Term::Lit: return t->value < 0 ? "(- " + std::to_string(-t->value) + ")" : std::to_string(t->value);
        case Term::Add: return "(+ " + term_str(t->args[0], vp) + " " + term_str(t->args[1], vp) + ")";
        case Term::App: return "(" + t->name + " " + term_str(t->args[0], vp) + ")";
    }
    return "?";
}

std::string formula_str(const FormulaP& f, const std::string& vp) {
    auto many = [&](const char* op) {
        std::string s = std::string("(") + op;
        for (auto& k : f->kids) s += " " + formula_str(k, vp);
        return s + ")";
    };
    switch (f->kind) {
        case Formula::True: return "true";
        case Formula::False: return "false";
        case Formula::Eq: return "(= " + term_str(f->terms[0], vp) + " " + term_str(f->terms[1], vp) + ")";
        case Formula::Lt: return "(< " + term_str(f->terms[0], vp) + " " + term_str(f->terms[1], vp) + ")";
        case Formula::Rel: {
            if (f->terms.empty()) return f->name;
            std::string s = "(" + f->name;
            for (auto& t : f->terms) s += " " + term_str(t, vp);
            return s + ")";
        }
        case Formula::Not:
            if (vp.empty() && f->kids[0]->kind == Formula::Lt)
                return "(<= " + term_str(f->kids[0]->terms[1], vp) + " " + term_str(f->kids[0]->terms[0], vp) + ")";
            return many("not");
        case Formula::And: return many("and");
        case Formula::Or: return many("or");
        case Formula::Implies: return many("=>");
        case Formula::Iff: return many("=");
        case Formula::Forall:
        case Formula::Exists: {
            std::string s = f->kind == Formula::Forall ? "(forall (" : "(exists (";
            for (size_t i = 0; i < f->vars.size(); ++i)
                s += (i ? " (" : "(") + sym(vp + f->vars[i].name) + (f->vars[i].sort == Sort::Loc ? " Loc)" : " Int)");
            return s + ") " + formula_str(f->kids[0], vp) + ")";
        }
    }
    return "?";
}

}  // namespace

std::string to_string(const TermP& t) { return term_str(t, "?"); }
std::string to_string(const FormulaP& f) { return formula_str(f, "?"); }
std::string to_lia_string(const TermP& t) { return term_str(t, ""); }
std::string to_lia_string(const FormulaP& f) { return formula_str(f, ""); }

std::string field_fn(int index) { return "m" + std::to_string(index); }
std::string fo_rel(const std::string& pred) { return pred + "_fo"; }
std::string eta_rel(const std::string& pred) { return pred + "_eta"; }

const char* tag_name(Tag t) {
    switch (t) {
        case Tag::Sid: return "sid";
        case Tag::Antecedent: return "antecedent";
        case Tag::Refutation: return "refutation";
        case Tag::Axiom: return "axiom";
    }
    return "?";
}

}  // namespace wsl::fo
