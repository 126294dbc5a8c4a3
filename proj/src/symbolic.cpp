#include "wsl/symbolic.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <queue>
#include <set>
#include <sstream>

#include "json.hpp"

namespace wsl::sym {

using fo::FormulaP;
using fo::TermP;
using json = nlohmann::json;

namespace {

TermP ivar(const std::string& n) { return fo::var(n, Sort::Int); }

std::optional<long long> ground_term(const TermP& t) {
    switch (t->kind) {
        case fo::Term::Lit: return t->value;
        case fo::Term::Add: {
            auto a = ground_term(t->args[0]), b = ground_term(t->args[1]);
            if (a && b) return *a + *b;
            return std::nullopt;
        }
        default: return std::nullopt;
    }
}

std::optional<bool> ground_eval(const FormulaP& f) {
    using K = fo::Formula::Kind;
    switch (f->kind) {
        case K::True: return true;
        case K::False: return false;
        case K::Eq:
        case K::Lt: {
            auto a = ground_term(f->terms[0]), b = ground_term(f->terms[1]);
            if (!a || !b) return std::nullopt;
            return f->kind == K::Eq ? *a == *b : *a < *b;
        }
        case K::Not: {
            auto a = ground_eval(f->kids[0]);
            if (!a) return std::nullopt;
            return !*a;
        }
        case K::And:
        case K::Or: {
            bool is_and = f->kind == K::And;
            bool unknown = false;
            for (auto& k : f->kids) {
                auto a = ground_eval(k);
                if (!a)
                    unknown = true;
                else if (*a != is_and)
                    return !is_and;
            }
            if (unknown) return std::nullopt;
            return is_and;
        }
        case K::Implies: {
            auto a = ground_eval(f->kids[0]), b = ground_eval(f->kids[1]);
            if (a && !*a) return true;
            if (b && *b) return true;
            if (a && b) return !*a || *b;
            return std::nullopt;
        }
        case K::Iff: {
            auto a = ground_eval(f->kids[0]), b = ground_eval(f->kids[1]);
            if (a && b) return *a == *b;
            return std::nullopt;
        }
        default: return std::nullopt;
    }
}

}  // namespace

bool decide_lia(const FormulaP& f, const LiaContext& ctx) {
    if (auto g = ground_eval(f)) return *g;
    std::string script = "(assert " + fo::to_string(f) + ")\n(check-sat-using (then simplify qe smt))\n";
    auto v = check_script(script, ctx.timeout, ctx.cfg, ctx.cancel);
    if (v.kind == SolverVerdict::Sat) return true;
    if (v.kind == SolverVerdict::Unsat) return false;
    throw LiaError("LIA query inconclusive (" + v.reason + ")");
}

// ---- LIA text ---------------------------------------------------------------

namespace {

std::string bare(const std::string& s) { return !s.empty() && s[0] == '?' ? s.substr(1) : s; }

bool is_number(const std::string& s) {
    if (s.empty()) return false;
    size_t i = s[0] == '-' ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

TermP lia_term(const SExpr& e) {
    if (!e.is_list) {
        if (is_number(e.atom)) return fo::lit(std::stoll(e.atom));
        return ivar(bare(e.atom));
    }
    if (e.size() < 2 || e[0].is_list) throw StructureError("bad LIA term " + e.str());
    auto& op = e[0].atom;
    if (op == "+") {
        TermP t = lia_term(e[1]);
        for (size_t i = 2; i < e.size(); ++i) t = fo::add(t, lia_term(e[i]));
        return t;
    }
    if (op == "-") {
        if (e.size() == 2) {
            auto a = lia_term(e[1]);
            if (a->kind != fo::Term::Lit) throw StructureError("unsupported negation " + e.str());
            return fo::lit(-a->value);
        }
        TermP t = lia_term(e[1]);
        for (size_t i = 2; i < e.size(); ++i) {
            auto b = lia_term(e[i]);
            if (b->kind != fo::Term::Lit) throw StructureError("unsupported subtraction " + e.str());
            t = fo::add(t, fo::lit(-b->value));
        }
        return t;
    }
    if (op == "*" && e.size() == 3) {
        auto a = lia_term(e[1]), b = lia_term(e[2]);
        if (b->kind == fo::Term::Lit) std::swap(a, b);
        if (a->kind != fo::Term::Lit) throw StructureError("nonlinear term " + e.str());
        if (b->kind == fo::Term::Lit) return fo::lit(a->value * b->value);
        if (a->value < 0 || a->value > 64) throw StructureError("unsupported coefficient " + e.str());
        TermP t = fo::lit(0);
        for (long long k = 0; k < a->value; ++k) t = fo::add(t, b);
        return t;
    }
    throw StructureError("bad LIA term " + e.str());
}

FormulaP lia_formula(const SExpr& e) {
    if (!e.is_list) {
        if (e.is("true")) return fo::top();
        if (e.is("false")) return fo::bot();
        throw StructureError("bad LIA formula " + e.str());
    }
    if (e.size() < 2 || e[0].is_list) throw StructureError("bad LIA formula " + e.str());
    auto& op = e[0].atom;
    auto kids = [&] {
        std::vector<FormulaP> ks;
        for (size_t i = 1; i < e.size(); ++i) ks.push_back(lia_formula(e[i]));
        return ks;
    };
    auto bin = [&] {
        if (e.size() != 3) throw StructureError("expected two arguments in " + e.str());
        return std::make_pair(lia_term(e[1]), lia_term(e[2]));
    };
    if (op == "=") {
        auto [a, b] = bin();
        return fo::eq(a, b);
    }
    if (op == "distinct") {
        auto [a, b] = bin();
        return fo::neq(a, b);
    }
    if (op == "<") {
        auto [a, b] = bin();
        return fo::lt(a, b);
    }
    if (op == "<=") {
        auto [a, b] = bin();
        return fo::le(a, b);
    }
    if (op == ">") {
        auto [a, b] = bin();
        return fo::lt(b, a);
    }
    if (op == ">=") {
        auto [a, b] = bin();
        return fo::le(b, a);
    }
    if (op == "not") return fo::neg(lia_formula(e[1]));
    if (op == "and") return fo::conj(kids());
    if (op == "or") return fo::disj(kids());
    if (op == "=>") return fo::implies(lia_formula(e[1]), lia_formula(e[2]));
    if (op == "forall" || op == "exists") {
        std::vector<VarDecl> vs;
        for (auto& d : e[1].items) {
            if (!d.is_list || d.size() != 2 || !d[1].is("Int")) throw StructureError("bad binder in " + e.str());
            vs.push_back({bare(d[0].atom), Sort::Int});
        }
        auto body = lia_formula(e[2]);
        return op == "forall" ? fo::forall(vs, body) : fo::exists(vs, body);
    }
    throw StructureError("bad LIA formula " + e.str());
}

}  // namespace

FormulaP parse_lia_formula(const std::string& text) {
    try {
        return lia_formula(parse_sexpr(text));
    } catch (const SExprError& e) {
        throw StructureError(std::string("bad LIA formula: ") + e.what());
    }
}

TermP parse_lia_term(const std::string& text) {
    try {
        return lia_term(parse_sexpr(text));
    } catch (const SExprError& e) {
        throw StructureError(std::string("bad LIA term: ") + e.what());
    }
}

// ---- structure basics -------------------------------------------------------

int node_index(const SymbolicStructure& s, const std::string& name) {
    if (name == "int") return kIntNode;
    for (size_t i = 0; i < s.nodes.size(); ++i)
        if (s.nodes[i].name == name) return int(i);
    throw StructureError("unknown node " + name);
}

std::optional<long long> singleton_value(const FormulaP& b) {
    if (b->kind != fo::Formula::Eq) return std::nullopt;
    auto& x = b->terms[0];
    auto& y = b->terms[1];
    if (x->kind == fo::Term::Var && x->name == "i" && y->kind == fo::Term::Lit) return y->value;
    if (y->kind == fo::Term::Var && y->name == "i" && x->kind == fo::Term::Lit) return x->value;
    return std::nullopt;
}

namespace {

FormulaP bound_at(const SymbolicStructure& s, int node, const TermP& t) {
    if (node == kIntNode) return fo::top();
    return fo::subst(s.nodes[node].bound, {{"i", t}});
}

std::string node_name(const SymbolicStructure& s, int n) { return n == kIntNode ? "int" : s.nodes[n].name; }

bool vars_within(const std::set<std::string>& fv, const std::set<std::string>& allowed) {
    for (auto& v : fv)
        if (!allowed.count(v)) return false;
    return true;
}

std::set<std::string> term_var_set(const TermP& t) { return fo::free_vars(fo::eq(t, fo::add(t, fo::lit(1)))); }

std::set<std::string> index_vars(size_t k) {
    std::set<std::string> out;
    for (size_t j = 1; j <= k; ++j) out.insert("i" + std::to_string(j));
    return out;
}

}  // namespace

FragmentReport validate_structure(const SymbolicStructure& s, const LiaContext& ctx) {
    FragmentReport r;
    r.category = "symbolic-structure";
    auto fail = [&](const std::string& w) {
        r.verdict = false;
        r.witness = w;
        return r;
    };
    if (s.nodes.empty()) return fail("no loc nodes");
    std::set<std::string> names;
    for (auto& n : s.nodes) {
        if (n.name == "int" || !names.insert(n.name).second) return fail("duplicate or reserved node name " + n.name);
        if (!vars_within(fo::free_vars(n.bound), {"i"})) return fail("bound of " + n.name + " has free variables");
        if (!decide_lia(fo::exists({{"i", Sort::Int}}, n.bound), ctx))
            return fail("bound of node " + n.name + " is unsatisfiable: " + fo::to_lia_string(n.bound));
    }
    if (s.null_node < 0 || s.null_node >= int(s.nodes.size())) return fail("null node missing");
    {
        auto& b = s.nodes[s.null_node].bound;
        auto uniq = fo::exists({{"i", Sort::Int}},
                               fo::conj({b, fo::forall({{"j", Sort::Int}}, fo::implies(fo::subst(b, {{"i", ivar("j")}}),
                                                                                        fo::eq(ivar("j"), ivar("i"))))}));
        if (!decide_lia(uniq, ctx)) return fail("null node " + s.nodes[s.null_node].name + " is not a singleton");
    }
    for (auto& [c, so] : s.sig.constants) {
        auto it = s.consts.find(c);
        if (it == s.consts.end()) return fail("constant " + c + " has no interpretation");
        auto& e = it->second;
        if ((so == Sort::Int) != (e.node == kIntNode)) return fail("constant " + c + " placed in a node of the wrong sort");
        if (e.node != kIntNode && (e.node < 0 || e.node >= int(s.nodes.size())))
            return fail("constant " + c + " placed in unknown node");
        if (!term_var_set(e.index).empty()) return fail("constant " + c + " has a non-ground index");
        if (!decide_lia(bound_at(s, e.node, e.index), ctx))
            return fail("constant " + c + " index violates the bound of " + node_name(s, e.node));
    }
    if (auto it = s.consts.find("nil"); it == s.consts.end() || it->second.node != s.null_node)
        return fail("nil is not interpreted in the null node");
    if (s.funcs.size() != s.sig.fields.size()) return fail("wrong number of field functions");
    for (size_t f = 0; f < s.funcs.size(); ++f) {
        for (int n = 0; n < int(s.nodes.size()); ++n) {
            auto it = s.funcs[f].find(n);
            std::string where = fo::field_fn(int(f + 1)) + " on " + s.nodes[n].name;
            if (it == s.funcs[f].end()) return fail(where + " is undefined");
            auto& e = it->second;
            if ((s.sig.fields[f] == Sort::Int) != (e.node == kIntNode)) return fail(where + " has the wrong sort");
            if (e.node != kIntNode && (e.node < 0 || e.node >= int(s.nodes.size())))
                return fail(where + " targets an unknown node");
            if (!vars_within(term_var_set(e.index), {"i"})) return fail(where + " has free variables");
            auto closure = fo::forall({{"i", Sort::Int}}, fo::implies(s.nodes[n].bound, bound_at(s, e.node, e.index)));
            if (!decide_lia(closure, ctx)) return fail(where + " violates the closure condition");
        }
    }
    for (auto& [rname, entries] : s.rels) {
        auto sit = s.sig.relations.find(rname);
        if (sit == s.sig.relations.end()) return fail("relation " + rname + " is not in the signature");
        for (auto& [nodes, f] : entries) {
            if (nodes.size() != sit->second.size()) return fail("relation " + rname + " entry has wrong arity");
            for (size_t j = 0; j < nodes.size(); ++j) {
                bool is_int = sit->second[j] == Sort::Int;
                if (is_int != (nodes[j] == kIntNode)) return fail("relation " + rname + " entry has a sort mismatch");
                if (!is_int && (nodes[j] < 0 || nodes[j] >= int(s.nodes.size())))
                    return fail("relation " + rname + " entry uses an unknown node");
            }
            if (!vars_within(fo::free_vars(f), index_vars(nodes.size())))
                return fail("relation " + rname + " entry has free variables");
        }
    }
    return r;
}

// ---- compilation --------------------------------------------------------------

namespace {

struct SymTerm {
    int node;
    TermP t;
};

using RelProvider = std::function<FormulaP(const std::string&, const std::vector<int>&)>;

class Compiler {
public:
    Compiler(const SymbolicStructure& s, RelProvider rel) : s_(s), rel_(std::move(rel)) {}

    FormulaP formula(const FormulaP& f, const std::map<std::string, SymTerm>& env) {
        using K = fo::Formula::Kind;
        switch (f->kind) {
            case K::True:
            case K::False: return f;
            case K::Eq: {
                auto a = term(f->terms[0], env), b = term(f->terms[1], env);
                if (a.node != b.node) return fo::bot();
                return fo::eq(a.t, b.t);
            }
            case K::Lt: {
                auto a = term(f->terms[0], env), b = term(f->terms[1], env);
                return fo::lt(a.t, b.t);
            }
            case K::Rel: {
                std::vector<int> nodes;
                fo::Subst sub;
                for (size_t j = 0; j < f->terms.size(); ++j) {
                    auto a = term(f->terms[j], env);
                    nodes.push_back(a.node);
                    sub["i" + std::to_string(j + 1)] = a.t;
                }
                auto entry = rel_(f->name, nodes);
                if (!entry) return fo::bot();
                return fo::subst(entry, sub);
            }
            case K::Not: return fo::neg(formula(f->kids[0], env));
            case K::And:
            case K::Or: {
                std::vector<FormulaP> ks;
                for (auto& k : f->kids) ks.push_back(formula(k, env));
                return f->kind == K::And ? fo::conj(ks) : fo::disj(ks);
            }
            case K::Implies: return fo::implies(formula(f->kids[0], env), formula(f->kids[1], env));
            case K::Iff: return fo::iff(formula(f->kids[0], env), formula(f->kids[1], env));
            case K::Forall:
            case K::Exists: return quant(f->kind == K::Forall, f->vars, 0, f->kids[0], env);
        }
        return f;
    }

    SymTerm term(const TermP& t, const std::map<std::string, SymTerm>& env) {
        switch (t->kind) {
            case fo::Term::Const: {
                auto it = s_.consts.find(t->name);
                if (it == s_.consts.end()) throw StructureError("constant " + t->name + " is not interpreted");
                return {it->second.node, it->second.index};
            }
            case fo::Term::Var: {
                auto it = env.find(t->name);
                if (it == env.end()) throw StructureError("free variable " + t->name + " in sentence");
                return it->second;
            }
            case fo::Term::Lit: return {kIntNode, t};
            case fo::Term::Add: return {kIntNode, fo::add(term(t->args[0], env).t, term(t->args[1], env).t)};
            case fo::Term::App: {
                auto a = term(t->args[0], env);
                int f = std::stoi(t->name.substr(1)) - 1;
                if (a.node == kIntNode || f < 0 || f >= int(s_.funcs.size()))
                    throw StructureError("bad application of " + t->name);
                auto it = s_.funcs[f].find(a.node);
                if (it == s_.funcs[f].end())
                    throw StructureError(t->name + " undefined on node " + s_.nodes[a.node].name);
                return {it->second.node, fo::subst_term(it->second.index, {{"i", a.t}})};
            }
        }
        throw StructureError("bad term");
    }

private:
    FormulaP quant(bool all, const std::vector<VarDecl>& vs, size_t k, const FormulaP& body,
                   const std::map<std::string, SymTerm>& env) {
        if (k == vs.size()) return formula(body, env);
        auto& v = vs[k];
        std::string q = "q" + std::to_string(fresh_++);
        if (v.sort == Sort::Int) {
            auto e = env;
            e[v.name] = {kIntNode, ivar(q)};
            auto inner = quant(all, vs, k + 1, body, e);
            return all ? fo::forall({{q, Sort::Int}}, inner) : fo::exists({{q, Sort::Int}}, inner);
        }
        std::vector<FormulaP> parts;
        for (int n = 0; n < int(s_.nodes.size()); ++n) {
            auto e = env;
            auto& b = s_.nodes[n].bound;
            if (auto c = singleton_value(b)) {
                e[v.name] = {n, fo::lit(*c)};
                parts.push_back(quant(all, vs, k + 1, body, e));
                continue;
            }
            e[v.name] = {n, ivar(q)};
            auto inner = quant(all, vs, k + 1, body, e);
            auto guard = fo::subst(b, {{"i", ivar(q)}});
            parts.push_back(all ? fo::forall({{q, Sort::Int}}, fo::implies(guard, inner))
                                : fo::exists({{q, Sort::Int}}, fo::conj({guard, inner})));
        }
        return all ? fo::conj(parts) : fo::disj(parts);
    }

    const SymbolicStructure& s_;
    RelProvider rel_;
    int fresh_ = 0;
};

RelProvider lookup_provider(const SymbolicStructure& s) {
    return [&s](const std::string& r, const std::vector<int>& nodes) -> FormulaP {
        auto it = s.rels.find(r);
        if (it == s.rels.end()) {
            if (!s.sig.relations.count(r)) throw StructureError("relation " + r + " is not interpreted");
            return nullptr;
        }
        auto e = it->second.find(nodes);
        return e == it->second.end() ? nullptr : e->second;
    };
}

}  // namespace

FormulaP compile_sentence(const SymbolicStructure& s, const FormulaP& sentence) {
    Compiler c(s, lookup_provider(s));
    return c.formula(sentence, {});
}

bool model_check(const SymbolicStructure& s, const FormulaP& sentence, const LiaContext& ctx) {
    return decide_lia(compile_sentence(s, sentence), ctx);
}

bool node_is_infinite(const SymbolicStructure& s, int node, const LiaContext& ctx) {
    auto& b = s.nodes.at(node).bound;
    if (singleton_value(b)) return false;
    auto far = fo::disj({fo::lt(ivar("b"), ivar("i")), fo::lt(fo::add(ivar("i"), ivar("b")), fo::lit(0))});
    auto f = fo::forall({{"b", Sort::Int}}, fo::exists({{"i", Sort::Int}}, fo::conj({b, far})));
    return decide_lia(f, ctx);
}

bool has_infinite_domain(const SymbolicStructure& s, const LiaContext& ctx) {
    for (int n = 0; n < int(s.nodes.size()); ++n)
        if (node_is_infinite(s, n, ctx)) return true;
    return false;
}

// ---- serialization ------------------------------------------------------------

namespace {

const char* sort_str(Sort s) { return s == Sort::Loc ? "loc" : "int"; }
Sort sort_of(const std::string& s) {
    if (s == "loc") return Sort::Loc;
    if (s == "int") return Sort::Int;
    throw StructureError("unknown sort " + s);
}

}  // namespace

std::string to_json(const SymbolicStructure& s) {
    json j;
    j["fields"] = json::array();
    for (auto so : s.sig.fields) j["fields"].push_back(sort_str(so));
    j["nodes"] = json::array();
    for (auto& n : s.nodes) j["nodes"].push_back({{"name", n.name}, {"bound", fo::to_lia_string(n.bound)}});
    j["null"] = s.nodes.at(s.null_node).name;
    j["constants"] = json::object();
    for (auto& [c, e] : s.consts) j["constants"][c] = {{"node", node_name(s, e.node)}, {"index", fo::to_lia_string(e.index)}};
    j["functions"] = json::object();
    for (size_t f = 0; f < s.funcs.size(); ++f) {
        json fj = json::object();
        for (auto& [n, e] : s.funcs[f])
            fj[s.nodes[n].name] = {{"node", node_name(s, e.node)}, {"term", fo::to_lia_string(e.index)}};
        j["functions"][fo::field_fn(int(f + 1))] = fj;
    }
    j["relations"] = json::object();
    for (auto& [r, sorts] : s.sig.relations) {
        json rj;
        rj["sorts"] = json::array();
        for (auto so : sorts) rj["sorts"].push_back(sort_str(so));
        rj["entries"] = json::array();
        if (auto it = s.rels.find(r); it != s.rels.end())
            for (auto& [nodes, f] : it->second) {
                json ns = json::array();
                for (auto n : nodes) ns.push_back(node_name(s, n));
                rj["entries"].push_back({{"nodes", ns}, {"formula", fo::to_lia_string(f)}});
            }
        j["relations"][r] = rj;
    }
    return j.dump(2);
}

SymbolicStructure from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw StructureError(std::string("malformed structure JSON: ") + e.what());
    }
    try {
        SymbolicStructure s;
        for (auto& f : j.at("fields")) s.sig.fields.push_back(sort_of(f.get<std::string>()));
        for (auto& n : j.at("nodes"))
            s.nodes.push_back({n.at("name").get<std::string>(), parse_lia_formula(n.at("bound").get<std::string>())});
        s.null_node = node_index(s, j.at("null").get<std::string>());
        if (s.null_node == kIntNode) throw StructureError("null node cannot be the int node");
        for (auto& [c, e] : j.at("constants").items()) {
            int n = node_index(s, e.at("node").get<std::string>());
            s.consts[c] = {n, parse_lia_term(e.at("index").get<std::string>())};
            s.sig.constants[c] = n == kIntNode ? Sort::Int : Sort::Loc;
        }
        s.funcs.resize(s.sig.fields.size());
        for (auto& [fname, fj] : j.at("functions").items()) {
            if (fname.size() < 2 || fname[0] != 'm') throw StructureError("bad function name " + fname);
            size_t f = std::stoul(fname.substr(1));
            if (f < 1 || f > s.funcs.size()) throw StructureError("function " + fname + " outside the record shape");
            for (auto& [src, e] : fj.items())
                s.funcs[f - 1][node_index(s, src)] = {node_index(s, e.at("node").get<std::string>()),
                                                      parse_lia_term(e.at("term").get<std::string>())};
        }
        for (auto& [r, rj] : j.at("relations").items()) {
            auto& sorts = s.sig.relations[r];
            for (auto& so : rj.at("sorts")) sorts.push_back(sort_of(so.get<std::string>()));
            auto& dst = s.rels[r];
            for (auto& e : rj.at("entries")) {
                std::vector<int> nodes;
                for (auto& n : e.at("nodes")) nodes.push_back(node_index(s, n.get<std::string>()));
                dst[nodes] = parse_lia_formula(e.at("formula").get<std::string>());
            }
        }
        return s;
    } catch (const json::exception& e) {
        throw StructureError(std::string("malformed structure JSON: ") + e.what());
    }
}

SymbolicStructure load_structure(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StructureError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

std::string to_dot(const SymbolicStructure& s, const std::vector<int>& infinite) {
    std::map<int, std::vector<std::string>> labels;
    for (auto& [c, e] : s.consts)
        if (e.node != kIntNode && c != "nil") labels[e.node].push_back(c);
    auto esc = [](const std::string& x) {
        std::string o;
        for (char ch : x) {
            if (ch == '"' || ch == '\\') o += '\\';
            o += ch;
        }
        return o;
    };
    std::string out = "digraph model {\n  rankdir=LR;\n  node [shape=circle];\n";
    for (int n = 0; n < int(s.nodes.size()); ++n) {
        std::string label = n == s.null_node ? "nil" : s.nodes[n].name;
        if (n != s.null_node && labels.count(n)) {
            label.clear();
            for (auto& c : labels[n]) label += (label.empty() ? "" : ",") + c;
        }
        bool inf = std::find(infinite.begin(), infinite.end(), n) != infinite.end();
        if (inf) label += "\\n" + fo::to_lia_string(s.nodes[n].bound);
        out += "  n" + std::to_string(n) + " [label=\"" + esc(label) + "\"" + (inf ? ", shape=doublecircle" : "") + "];\n";
    }
    for (size_t f = 0; f < s.funcs.size(); ++f)
        for (auto& [src, e] : s.funcs[f]) {
            if (e.node == kIntNode || src == s.null_node) continue;
            std::string label = fo::to_lia_string(e.index);
            if (s.funcs.size() > 1) label = fo::field_fn(int(f + 1)) + ": " + label;
            out += "  n" + std::to_string(src) + " -> n" + std::to_string(e.node) + " [label=\"" + esc(label) + "\"];\n";
        }
    out += "}\n";
    return out;
}

// ---- templates ------------------------------------------------------------------

std::string Template::name() const { return std::string(kind == List ? "list" : "tree") + ":" + std::to_string(rays); }

std::vector<Template> parse_templates(const std::string& spec) {
    std::vector<Template> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        auto colon = item.find(':');
        std::string kind = item.substr(0, colon);
        Template t;
        if (kind == "list")
            t.kind = Template::List;
        else if (kind == "tree")
            t.kind = Template::Tree;
        else
            throw std::invalid_argument("unknown template kind '" + kind + "'");
        if (colon != std::string::npos) {
            auto n = item.substr(colon + 1);
            if (n.empty() || n.find_first_not_of("0123456789") != std::string::npos || n.size() > 1)
                throw std::invalid_argument("bad ray count in template '" + item + "'");
            t.rays = std::stoi(n);
        }
        out.push_back(t);
    }
    if (out.empty()) throw std::invalid_argument("empty template list");
    return out;
}

std::vector<Template> default_templates(const fo::Signature& sig) {
    int loc_fields = int(std::count(sig.fields.begin(), sig.fields.end(), Sort::Loc));
    auto k = loc_fields >= 2 ? Template::Tree : Template::List;
    return {{k, 1}, {k, 0}, {k, 2}};
}

ForcedLiterals forced_literals(const fo::Obligation& o) {
    ForcedLiterals out;
    std::function<void(const FormulaP&)> walk = [&](const FormulaP& f) {
        using K = fo::Formula::Kind;
        if (f->kind == K::And) {
            for (auto& k : f->kids) walk(k);
            return;
        }
        bool negated = f->kind == K::Not;
        auto& a = negated ? f->kids[0] : f;
        if (a->kind != K::Eq) return;
        auto x = a->terms[0], y = a->terms[1];
        if (x->sort != Sort::Loc) return;
        auto is_c = [](const TermP& t) { return t->kind == fo::Term::Const; };
        auto is_app = [&](const TermP& t) { return t->kind == fo::Term::App && is_c(t->args[0]); };
        if (is_c(x) && is_c(y)) {
            (negated ? out.distinct : out.equal).push_back({x->name, y->name});
            return;
        }
        if (negated) return;
        if (is_app(y) && is_c(x)) std::swap(x, y);
        if (is_app(x) && is_c(y)) out.points[{std::stoi(x->name.substr(1)) - 1, x->args[0]->name}] = y->name;
    };
    for (auto& a : o.assertions)
        if (a.tag == fo::Tag::Antecedent) walk(a.formula);
    return out;
}

// ---- skeleton generation ------------------------------------------------------------

namespace {

struct FieldChoice {
    enum Kind { ToNode, ToRayParam, RayShift, IntParam, IntShift } kind;
    int target = 0;
    long long delta = 0;
};

struct Partition {
    std::vector<int> block;  // per constant (index into loc constant list), 0 = nil's block
    int blocks = 1;
};

}  // namespace

struct SkeletonGenerator::Impl {
    const fo::Obligation& o;
    Template t;
    std::vector<std::string> locs;  // loc constants except nil
    std::vector<std::string> ints;
    ForcedLiterals forced;
    std::vector<Partition> partitions;
    std::map<size_t, std::vector<std::vector<FieldChoice>>> choice_cache;
    using Key = std::pair<size_t, std::vector<int>>;
    std::priority_queue<std::pair<long long, Key>, std::vector<std::pair<long long, Key>>, std::greater<>> queue;
    std::set<Key> seen;
    size_t produced = 0;

    Impl(const fo::Obligation& ob, const Template& tt) : o(ob), t(tt) {
        for (auto& [c, s] : o.sig.constants) {
            if (c == "nil") continue;
            (s == Sort::Loc ? locs : ints).push_back(c);
        }
        forced = forced_literals(o);
        build_partitions();
        if (!partitions.empty()) push({0, std::vector<int>(choices(0).size(), 0)});
    }

    int idx(const std::string& c) const {
        if (c == "nil") return -1;
        auto it = std::find(locs.begin(), locs.end(), c);
        return it == locs.end() ? -2 : int(it - locs.begin());
    }

    // Element blocks: -1 is nil; block ids with 0 reserved for nil.
    static std::vector<int> canon(std::vector<int> b) {
        std::map<int, int> re{{0, 0}};
        for (auto& x : b) {
            auto it = re.find(x);
            if (it == re.end()) it = re.emplace(x, int(re.size())).first;
            x = it->second;
        }
        return b;
    }

    int block_of(const std::vector<int>& b, const std::string& c) const {
        int i = idx(c);
        if (i == -1) return 0;
        if (i < 0) return -1;
        return b[i];
    }

    bool consistent(const std::vector<int>& b) const {
        for (auto& [x, y] : forced.distinct) {
            int bx = block_of(b, x), by = block_of(b, y);
            if (bx >= 0 && bx == by) return false;
        }
        for (auto& [x, y] : forced.equal) {
            int bx = block_of(b, x), by = block_of(b, y);
            if (bx >= 0 && by >= 0 && bx != by) return false;
        }
        std::map<std::pair<int, int>, int> target;
        for (auto& [src, d] : forced.points) {
            int bs = block_of(b, src.second), bd = block_of(b, d);
            if (bs < 0 || bd < 0) continue;
            if (bs == 0) return false;  // nil has no fields in the heap
            auto [it, fresh] = target.emplace(std::make_pair(src.first, bs), bd);
            if (!fresh && it->second != bd) return false;
        }
        return true;
    }

    void build_partitions() {
        size_t n = locs.size();
        std::vector<int> start(n);
        for (size_t i = 0; i < n; ++i) start[i] = int(i + 1);
        // Merge forced equalities up front.
        for (auto& [x, y] : forced.equal) {
            int bx = block_of(start, x), by = block_of(start, y);
            if (bx < 0 || by < 0 || bx == by) continue;
            int from = std::max(bx, by), to = std::min(bx, by);
            for (auto& v : start)
                if (v == from) v = to;
        }
        start = canon(start);
        std::set<std::vector<int>> seen_p{start};
        std::vector<std::vector<int>> level{start}, all{start};
        const size_t cap = 3000;
        while (!level.empty() && all.size() < cap) {
            std::vector<std::vector<int>> nxt;
            for (auto& b : level) {
                int maxb = b.empty() ? 0 : *std::max_element(b.begin(), b.end());
                for (int x = 0; x <= maxb; ++x)
                    for (int y = x + 1; y <= maxb; ++y) {
                        auto c = b;
                        for (auto& v : c)
                            if (v == y) v = x;
                        c = canon(c);
                        if (seen_p.insert(c).second) {
                            nxt.push_back(c);
                            all.push_back(c);
                        }
                    }
            }
            level = std::move(nxt);
        }
        for (auto& b : all)
            if (consistent(b)) {
                int blocks = b.empty() ? 1 : *std::max_element(b.begin(), b.end()) + 1;
                partitions.push_back({b, blocks});
            }
    }

    // Node layout: 0 null, 1..blocks-1 singletons, then rays.
    int num_nodes(const Partition& p) const { return p.blocks + t.rays; }
    bool is_ray(const Partition& p, int n) const { return n >= p.blocks; }

    const std::vector<std::vector<FieldChoice>>& choices(size_t pi) {
        auto it = choice_cache.find(pi);
        if (it != choice_cache.end()) return it->second;
        auto& p = partitions[pi];
        std::vector<std::vector<FieldChoice>> out;
        int nn = num_nodes(p);
        auto& fields = o.sig.fields;
        int loc_field = 0;
        for (size_t f = 0; f < fields.size(); ++f) {
            bool is_loc = fields[f] == Sort::Loc;
            for (int n = 1; n < nn; ++n) {
                std::vector<FieldChoice> cs;
                if (!is_loc) {
                    if (is_ray(p, n)) cs.push_back({FieldChoice::IntShift, kIntNode, 0});
                    cs.push_back({FieldChoice::IntParam, kIntNode, 0});
                    out.push_back(cs);
                    continue;
                }
                if (!is_ray(p, n)) {
                    std::optional<int> forced_target;
                    for (auto& [src, d] : forced.points)
                        if (src.first == int(f) && block_of(p.block, src.second) == n) {
                            int bd = block_of(p.block, d);
                            if (bd >= 0) forced_target = bd;
                        }
                    if (forced_target) {
                        cs.push_back({FieldChoice::ToNode, *forced_target, 0});
                        out.push_back(cs);
                        continue;
                    }
                    bool tree_side = t.kind == Template::Tree && loc_field % 2 == 1;
                    if (tree_side) cs.push_back({FieldChoice::ToNode, 0, 0});
                    // Singletons try rays in rotation.
                    for (int k = 0; k < t.rays; ++k)
                        cs.push_back({FieldChoice::ToRayParam, p.blocks + (n - 1 + k) % t.rays, 0});
                    if (!tree_side) cs.push_back({FieldChoice::ToNode, 0, 0});
                    for (int m = 1; m < p.blocks; ++m)
                        if (m != n) cs.push_back({FieldChoice::ToNode, m, 0});
                    cs.push_back({FieldChoice::ToNode, n, 0});
                } else {
                    bool tree_side = t.kind == Template::Tree && loc_field % 2 == 1;
                    if (tree_side) cs.push_back({FieldChoice::ToNode, 0, 0});
                    cs.push_back({FieldChoice::RayShift, n, 1});
                    for (int r = p.blocks; r < nn; ++r)
                        if (r != n) cs.push_back({FieldChoice::RayShift, r, 0});
                    if (!tree_side) cs.push_back({FieldChoice::ToNode, 0, 0});
                    for (int m = 1; m < p.blocks; ++m) cs.push_back({FieldChoice::ToNode, m, 0});
                }
                out.push_back(cs);
            }
            if (is_loc) ++loc_field;
        }
        return choice_cache[pi] = out;
    }

    void push(Key k) {
        if (!seen.insert(k).second) return;
        long long rank = (long long)k.first;
        for (auto v : k.second) rank += v;
        queue.push({rank, k});
    }

    std::optional<Skeleton> next() {
        if (queue.empty()) return std::nullopt;
        auto [rank, key] = queue.top();
        queue.pop();
        auto& cs = choices(key.first);
        for (size_t j = 0; j < key.second.size(); ++j)
            if (key.second[j] + 1 < int(cs[j].size())) {
                auto k2 = key;
                ++k2.second[j];
                push(k2);
            }
        if (key.first + 1 < partitions.size()) push({key.first + 1, std::vector<int>(choices(key.first + 1).size(), 0)});
        ++produced;
        return build(key);
    }

    Skeleton build(const Key& key) {
        auto& p = partitions[key.first];
        auto& cs = choices(key.first);
        Skeleton sk;
        auto& s = sk.shape;
        s.sig = o.sig;
        int nn = num_nodes(p);
        std::vector<std::string> first_const(p.blocks);
        for (size_t i = 0; i < locs.size(); ++i)
            if (first_const[p.block[i]].empty()) first_const[p.block[i]] = locs[i];
        for (int n = 0; n < nn; ++n) {
            if (n == 0)
                s.nodes.push_back({"null", fo::eq(ivar("i"), fo::lit(0))});
            else if (!is_ray(p, n))
                s.nodes.push_back({first_const[n], fo::eq(ivar("i"), fo::lit(0))});
            else
                s.nodes.push_back({"ray#" + std::to_string(n - p.blocks + 1), fo::le(fo::lit(0), ivar("i"))});
        }
        s.null_node = 0;
        std::vector<FormulaP> side;
        auto param = [&](bool nonneg) {
            std::string name = "p" + std::to_string(sk.params.size());
            sk.params.push_back(name);
            if (nonneg) side.push_back(fo::le(fo::lit(0), ivar(name)));
            return ivar(name);
        };
        s.consts["nil"] = {0, fo::lit(0)};
        for (size_t i = 0; i < locs.size(); ++i) s.consts[locs[i]] = {p.block[i], fo::lit(0)};
        for (auto& c : ints) s.consts[c] = {kIntNode, param(false)};
        auto& fields = o.sig.fields;
        s.funcs.resize(fields.size());
        size_t ci = 0;
        for (size_t f = 0; f < fields.size(); ++f) {
            if (fields[f] == Sort::Loc)
                s.funcs[f][0] = {0, fo::lit(0)};
            else
                s.funcs[f][0] = {kIntNode, param(false)};
            for (int n = 1; n < nn; ++n) {
                auto& ch = cs[ci][key.second[ci]];
                ++ci;
                Elem e{0, fo::lit(0)};
                switch (ch.kind) {
                    case FieldChoice::ToNode: e = {ch.target, fo::lit(0)}; break;
                    case FieldChoice::ToRayParam: e = {ch.target, param(true)}; break;
                    case FieldChoice::RayShift: e = {ch.target, fo::add(ivar("i"), fo::lit(ch.delta))}; break;
                    case FieldChoice::IntParam: e = {kIntNode, param(false)}; break;
                    case FieldChoice::IntShift: e = {kIntNode, fo::add(ivar("i"), param(false))}; break;
                }
                s.funcs[f][n] = e;
            }
        }
        sk.side = fo::conj(side);
        return sk;
    }
};

SkeletonGenerator::SkeletonGenerator(const fo::Obligation& o, const Template& t) : impl_(new Impl(o, t)) {}
SkeletonGenerator::~SkeletonGenerator() = default;
std::optional<Skeleton> SkeletonGenerator::next() { return impl_->next(); }
size_t SkeletonGenerator::produced() const { return impl_->produced; }

// ---- template compilation ------------------------------------------------------------

CompiledQuery compile_template(const Skeleton& sk, const fo::Obligation& o) {
    CompiledQuery q;
    q.skeleton = sk;
    auto& s = q.skeleton.shape;
    std::vector<FormulaP> side{sk.side};
    auto& params = q.skeleton.params;
    auto bit = [&](const std::string& name) {
        params.push_back(name);
        side.push_back(fo::le(fo::lit(0), ivar(name)));
        side.push_back(fo::le(ivar(name), fo::lit(1)));
        return ivar(name);
    };
    int counter = 0;
    RelProvider provider = [&](const std::string& r, const std::vector<int>& nodes) -> FormulaP {
        auto& entries = s.rels[r];
        if (auto it = entries.find(nodes); it != entries.end()) return it->second;
        std::string base = "r" + std::to_string(counter++) + "_";
        std::vector<int> pos;
        for (size_t j = 0; j < nodes.size(); ++j)
            if (nodes[j] == kIntNode || !singleton_value(s.nodes[nodes[j]].bound)) pos.push_back(int(j));
        auto iv = [](int j) { return ivar("i" + std::to_string(j + 1)); };
        std::vector<FormulaP> parts{fo::eq(bit(base + "on"), fo::lit(1))};
        int a = 0;
        // Offsets of order atoms range over [-1, 1]; unary atoms only on int positions.
        auto atom = [&](FormulaP f, bool small) {
            auto sel = bit(base + "s" + std::to_string(a));
            auto off = base + "o" + std::to_string(a++);
            params.push_back(off);
            if (small) {
                side.push_back(fo::le(fo::lit(-1), ivar(off)));
                side.push_back(fo::le(ivar(off), fo::lit(1)));
            }
            parts.push_back(fo::disj({fo::eq(sel, fo::lit(0)), fo::subst(f, {{"_o", ivar(off)}})}));
        };
        for (int x : pos) {
            for (int y : pos)
                if (x != y) atom(fo::le(iv(x), fo::add(iv(y), ivar("_o"))), true);
            if (nodes[x] == kIntNode) {
                atom(fo::le(iv(x), ivar("_o")), false);
                atom(fo::le(ivar("_o"), iv(x)), false);
            }
        }
        // Optional equality disjunct over positions sharing a ray.
        std::vector<FormulaP> eqs, any;
        for (size_t x = 0; x < pos.size(); ++x)
            for (size_t y = x + 1; y < pos.size(); ++y) {
                int nx = nodes[pos[x]], ny = nodes[pos[y]];
                if (nx != ny || nx == kIntNode) continue;
                auto e = bit(base + "e" + std::to_string(eqs.size()));
                eqs.push_back(fo::disj({fo::eq(e, fo::lit(0)), fo::eq(iv(pos[x]), iv(pos[y]))}));
                any.push_back(fo::eq(e, fo::lit(1)));
            }
        if (eqs.empty()) return entries[nodes] = fo::conj(parts);
        auto on = parts.front();
        parts.erase(parts.begin());
        eqs.push_back(fo::disj(any));
        return entries[nodes] = fo::conj({on, fo::disj({fo::conj(eqs), fo::conj(parts)})});
    };
    Compiler c(s, provider);
    std::vector<FormulaP> compiled;
    for (auto& a : o.assertions) compiled.push_back(c.formula(a.formula, {}));
    q.params = params;
    std::string script;
    for (auto& p : params) script += "(declare-fun " + fo::to_string(ivar(p)) + " () Int)\n";
    script += "(assert " + fo::to_string(fo::conj(side)) + ")\n";
    for (auto& f : compiled) script += "(assert " + fo::to_string(f) + ")\n";
    script += "(check-sat)\n";
    if (!params.empty()) {
        script += "(get-value (";
        for (size_t i = 0; i < params.size(); ++i) script += (i ? " " : "") + fo::to_string(ivar(params[i]));
        script += "))\n";
    }
    q.script = script;
    return q;
}

SymbolicStructure instantiate(const Skeleton& sk, const std::map<std::string, long long>& values) {
    fo::Subst sub;
    for (auto& p : sk.params) {
        auto it = values.find(p);
        sub[p] = fo::lit(it == values.end() ? 0 : it->second);
    }
    SymbolicStructure s = sk.shape;
    for (auto& [c, e] : s.consts) e.index = fo::subst_term(e.index, sub);
    for (auto& f : s.funcs)
        for (auto& [n, e] : f) e.index = fo::subst_term(e.index, sub);
    for (auto& [r, entries] : s.rels) {
        std::map<std::vector<int>, FormulaP> kept;
        for (auto& [nodes, f] : entries) {
            auto g = fo::subst(f, sub);
            if (g->kind != fo::Formula::False) kept[nodes] = g;
        }
        entries = kept;
    }
    return s;
}

namespace {

bool certifies(const SymbolicStructure& s, const fo::Obligation& o, const LiaContext& ctx) {
    for (auto& a : o.assertions)
        if (!model_check(s, a.formula, ctx)) return false;
    return true;
}

// Drops heaplet entries for tuples whose predicate is false, if the result still certifies.
SymbolicStructure tidy(const SymbolicStructure& s, const fo::Obligation& o, const LiaContext& ctx) {
    SymbolicStructure t = s;
    bool changed = false;
    for (auto& [r, entries] : t.rels) {
        if (r.size() < 4 || r.compare(r.size() - 4, 4, "_eta") != 0) continue;
        auto fo_name = r.substr(0, r.size() - 4) + "_fo";
        auto fit = t.rels.find(fo_name);
        for (auto it = entries.begin(); it != entries.end();) {
            std::vector<int> head(it->first.begin(), it->first.end() - 1);
            if (fit == t.rels.end() || !fit->second.count(head)) {
                it = entries.erase(it);
                changed = true;
            } else {
                ++it;
            }
        }
    }
    if (!changed) return s;
    try {
        if (certifies(t, o, ctx)) return t;
    } catch (const LiaError&) {
    }
    return s;
}

}  // namespace

FindResult find_model(const fo::Obligation& o, const std::vector<Template>& templates, const FindOptions& opts) {
    FindResult res;
    auto start = std::chrono::steady_clock::now();
    auto deadline = start + opts.timeout;
    std::vector<std::pair<Template, std::unique_ptr<SkeletonGenerator>>> gens;
    for (auto& t : templates) gens.emplace_back(t, std::make_unique<SkeletonGenerator>(o, t));
    auto left = [&] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    };
    while (!gens.empty()) {
        for (size_t g = 0; g < gens.size();) {
            if (left().count() <= 0 || (opts.cancel && opts.cancel->load()) || res.skeletons >= opts.max_skeletons) {
                res.timed_out = left().count() <= 0;
                return res;
            }
            auto sk = gens[g].second->next();
            if (!sk) {
                gens.erase(gens.begin() + long(g));
                continue;
            }
            ++res.skeletons;
            auto q = compile_template(*sk, o);
            auto budget = std::min(opts.per_query, left());
            auto v = check_script(q.script, budget, opts.cfg, opts.cancel);
            if (v.kind == SolverVerdict::Sat) {
                std::map<std::string, long long> values;
                if (!q.params.empty()) {
                    auto items = parse_sexprs(v.transcript);
                    if (items.size() < 2) throw LiaError("template query returned no parameter values");
                    for (auto& [k, x] : parse_int_values(items[1].str())) values[bare(k)] = x;
                }
                auto s = instantiate(q.skeleton, values);
                LiaContext ctx{opts.cfg, std::max(left(), std::chrono::milliseconds(20000)), opts.cancel};
                auto rep = validate_structure(s, ctx);
                if (!rep.verdict) throw LiaError("template produced an invalid structure: " + rep.witness);
                for (auto& a : o.assertions)
                    if (!model_check(s, a.formula, ctx))
                        throw LiaError("template model fails certification on " + a.label);
                
                res.model = tidy(s, o, ctx);
                res.template_name = gens[g].first.name();
                return res;
            }
            ++g;
        }
    }
    return res;
}

}  // namespace wsl::sym
