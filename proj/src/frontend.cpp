#include "wsl/frontend.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

namespace wsl {

namespace {

struct Token {
    enum Kind { Id, Int, Sym, End } kind;
    std::string text;
    long long value = 0;
    int line = 1, col = 1;
};

std::vector<Token> lex(const std::string& s) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto adv = [&](size_t n) {
        for (size_t k = 0; k < n && i < s.size(); ++k, ++i) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    static const char* syms[] = {"\\/", "->", "!=", "<=", ">=", ":=", "|-", "=>", "&", "*", ".", ",",
                                 ";",   "(",  ")",  "{",  "}",  "=",  "<",  ">",  "+", "-", ":"};
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            adv(1);
            continue;
        }
        if (s.compare(i, 2, "//") == 0) {
            while (i < s.size() && s[i] != '\n') adv(1);
            continue;
        }
        if (s.compare(i, 2, "/*") == 0) {
            int l0 = line, c0 = col;
            adv(2);
            while (i < s.size() && s.compare(i, 2, "*/") != 0) adv(1);
            if (i >= s.size()) throw ParseError("unterminated comment", l0, c0);
            adv(2);
            continue;
        }
        Token t;
        t.line = line;
        t.col = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '\''))
                ++j;
            t.kind = Token::Id;
            t.text = s.substr(i, j - i);
            adv(j - i);
            out.push_back(t);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            t.kind = Token::Int;
            t.text = s.substr(i, j - i);
            try {
                t.value = std::stoll(t.text);
            } catch (...) {
                throw ParseError("integer literal out of range", line, col);
            }
            adv(j - i);
            out.push_back(t);
            continue;
        }
        bool matched = false;
        for (auto* sym : syms) {
            size_t n = std::char_traits<char>::length(sym);
            if (s.compare(i, n, sym) == 0) {
                t.kind = Token::Sym;
                t.text = sym;
                adv(n);
                out.push_back(t);
                matched = true;
                break;
            }
        }
        if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    Token e;
    e.kind = Token::End;
    e.text = "end of input";
    e.line = line;
    e.col = col;
    out.push_back(e);
    return out;
}

bool clashes_with_encoding(const std::string& id) {
    static const std::set<std::string> smt = {"and", "or", "not", "ite", "true", "false", "distinct", "let",
                                              "forall", "exists", "Loc", "Int", "Bool", "div", "mod", "abs"};
    if (smt.count(id)) return true;
    if (id.size() > 1 && id[0] == 'm' &&
        id.find_first_not_of("0123456789", 1) == std::string::npos)
        return true;
    auto ends = [&](const std::string& suf) {
        return id.size() >= suf.size() && id.compare(id.size() - suf.size(), suf.size(), suf) == 0;
    };
    return ends("_fo") || ends("_eta");
}

const std::set<std::string> keywords = {"data", "pred", "checkentail", "exists", "forall", "emp", "nil", "int", "loc"};

// Sort inference over symbol keys.
struct SortUF {
    std::map<std::string, std::string> parent;
    std::string find(const std::string& k) {
        auto it = parent.find(k);
        if (it == parent.end()) {
            parent[k] = k;
            return k;
        }
        if (it->second == k) return k;
        auto r = find(it->second);
        parent[k] = r;
        return r;
    }
    bool unite(const std::string& a, const std::string& b) {
        auto ra = find(a), rb = find(b);
        if (ra == rb) return true;
        if ((ra == "LOC" && rb == "INT") || (ra == "INT" && rb == "LOC")) return false;
        if (rb == "LOC" || rb == "INT")
            parent[ra] = rb;
        else
            parent[rb] = ra;
        return true;
    }
    Sort sort_of(const std::string& k) { return find(k) == "INT" ? Sort::Int : Sort::Loc; }
};

struct RawPred {
    std::string name;
    std::vector<std::string> param_names;
    FormulaP body;
    int line, col;
};

class Parser {
public:
    Parser(const std::string& text, bool allow_reserved) : toks_(lex(text)), allow_reserved_(allow_reserved) {}

    Problem run() {
        Problem p;
        if (peek().kind == Token::End) fail("expected data/pred/checkentail");
        while (true) {
            if (is_kw("data"))
                parse_data(p);
            else if (is_kw("pred"))
                parse_pred();
            else if (is_kw("checkentail"))
                break;
            else
                fail("expected data/pred/checkentail");
        }
        p.query_line = peek().line;
        next();
        in_query_ = true;
        scopes_.clear();
        std::vector<FormulaP> ants;
        ants.push_back(parse_formula());
        while (accept(",")) ants.push_back(parse_formula());
        expect("|-");
        auto cons = parse_formula();
        expect(";");
        if (peek().kind != Token::End) fail("expected end of input after query");

        for (auto& u : pred_uses_)
            if (!pred_arity_.count(u.name)) throw ParseError("sort error: undeclared predicate " + u.name, u.line, u.col);
        std::vector<FormulaP> all = ants;
        all.push_back(cons);
        for (auto& rp : raw_preds_) constrain(rp.body, rp.line, rp.col);
        for (auto& f : all) constrain(f, p.query_line, 1);

        p.vocab.constants["nil"] = Sort::Loc;
        for (auto& rp : raw_preds_) {
            PredSig sig;
            sig.name = rp.name;
            for (size_t i = 0; i < rp.param_names.size(); ++i)
                sig.params.push_back(uf_.sort_of(rp.name + "#" + std::to_string(i)));
            p.vocab.preds[rp.name] = sig;
        }
        p.vocab.record_shape = shape_;
        p.vocab.record_name = record_name_.empty() ? "node" : record_name_;
        p.vocab.field_names = field_names_;
        for (auto& rp : raw_preds_) p.sid.defs.push_back(make_def(rp));
        for (auto& a : ants) p.antecedents.push_back(finalize(a));
        p.consequent = finalize(cons);
        for (auto& [k, name] : display_)
            if (k.rfind("c:", 0) == 0) {
                p.program_constants[name] = uf_.sort_of(k);
                p.vocab.constants[name] = uf_.sort_of(k);
            }
        return p;
    }

private:
    std::vector<Token> toks_;
    size_t pos_ = 0;
    bool allow_reserved_;
    bool in_query_ = false;
    std::string current_pred_;
    std::vector<std::map<std::string, std::string>> scopes_;
    std::map<std::string, std::string> display_;
    std::vector<RawPred> raw_preds_;
    std::map<std::string, size_t> pred_arity_;
    std::vector<Sort> shape_;
    std::vector<std::string> field_names_;
    std::string record_name_;
    int fresh_ = 0;
    SortUF uf_;

    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool is_kw(const char* kw) const { return peek().kind == Token::Id && peek().text == kw; }
    bool is_sym(const char* s) const { return peek().kind == Token::Sym && peek().text == s; }
    bool accept(const char* s) {
        if (is_sym(s)) {
            next();
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg + " (found '" + peek().text + "')", peek().line, peek().col);
    }
    void expect(const char* s) {
        if (!accept(s)) fail(std::string("expected '") + s + "'");
    }
    std::string ident(const char* what) {
        if (peek().kind != Token::Id) fail(std::string("expected ") + what);
        auto& t = peek();
        if (keywords.count(t.text)) fail(std::string("expected ") + what + ", got keyword");
        if (t.text[0] == '_' && !allow_reserved_) fail("identifiers starting with '_' are reserved");
        if (clashes_with_encoding(t.text)) fail("identifier " + t.text + " clashes with a solver-level name");
        return next().text;
    }

    void parse_data(Problem&) {
        auto& kw = next();
        if (!record_name_.empty()) throw ParseError("multiple record shapes are not supported", kw.line, kw.col);
        record_name_ = ident("record name");
        expect("{");
        do {
            Sort s;
            if (is_kw("int")) {
                next();
                s = Sort::Int;
            } else if (peek().kind == Token::Id && peek().text == record_name_) {
                next();
                s = Sort::Loc;
            } else {
                fail("expected field type (int or " + record_name_ + ")");
            }
            field_names_.push_back(ident("field name"));
            shape_.push_back(s);
            expect(";");
        } while (!is_sym("}"));
        expect("}");
        expect(";");
    }

    std::optional<Sort> opt_annotation() {
        if (!accept(":")) return std::nullopt;
        if (is_kw("int")) {
            next();
            return Sort::Int;
        }
        if (is_kw("loc") || (peek().kind == Token::Id && peek().text == record_name_)) {
            next();
            return Sort::Loc;
        }
        fail("expected sort");
    }

    void parse_pred() {
        next();
        RawPred rp;
        rp.line = peek().line;
        rp.col = peek().col;
        rp.name = ident("predicate name");
        if (pred_arity_.count(rp.name)) fail("predicate " + rp.name + " declared twice");
        expect("(");
        std::map<std::string, std::string> scope;
        if (!is_sym(")")) {
            do {
                auto n = ident("parameter");
                if (scope.count(n)) fail("duplicate parameter " + n);
                std::string key = rp.name + "#" + std::to_string(rp.param_names.size());
                if (auto s = opt_annotation()) uf_.unite(key, *s == Sort::Int ? "INT" : "LOC");
                scope[n] = key;
                display_[key] = n;
                rp.param_names.push_back(n);
            } while (accept(","));
        }
        expect(")");
        pred_arity_[rp.name] = rp.param_names.size();
        expect(":=");
        current_pred_ = rp.name;
        scopes_ = {scope};
        rp.body = parse_formula();
        expect(";");
        current_pred_.clear();
        raw_preds_.push_back(rp);
    }

    // formula := disj ("=>" formula)?
    FormulaP parse_formula() {
        auto lhs = parse_disj();
        if (accept("=>")) return mk_implies(lhs, parse_formula());
        return lhs;
    }
    FormulaP parse_disj() {
        std::vector<FormulaP> ks{parse_conj()};
        while (accept("\\/")) ks.push_back(parse_conj());
        return ks.size() == 1 ? ks[0] : mk_or(ks);
    }
    FormulaP parse_conj() {
        std::vector<FormulaP> ks{parse_sep()};
        while (accept("&")) ks.push_back(parse_sep());
        return ks.size() == 1 ? ks[0] : mk_and(ks);
    }
    FormulaP parse_sep() {
        std::vector<FormulaP> ks{parse_unary()};
        while (accept("*")) ks.push_back(parse_unary());
        return ks.size() == 1 ? ks[0] : mk_sep(ks);
    }
    FormulaP parse_unary() {
        if (is_kw("exists") || is_kw("forall")) {
            bool ex = peek().text == "exists";
            next();
            std::vector<VarDecl> vars;
            std::map<std::string, std::string> scope;
            do {
                auto n = ident("variable");
                std::string key = "b" + std::to_string(fresh_++);
                if (auto s = opt_annotation()) uf_.unite(key, *s == Sort::Int ? "INT" : "LOC");
                display_[key] = n;
                scope[n] = key;
                vars.push_back({key, Sort::Loc});
            } while (accept(","));
            expect(".");
            scopes_.push_back(scope);
            auto body = parse_formula();
            scopes_.pop_back();
            return mk_quant(ex ? Formula::Exists : Formula::Forall, vars, body);
        }
        if (is_kw("emp")) {
            next();
            return mk_emp();
        }
        if (is_sym("(")) {
            size_t save = pos_;
            next();
            try {
                auto f = parse_formula();
                expect(")");
                // A parenthesised term followed by a relation is an atom.
                if (!is_relop() && !is_sym("->")) return f;
            } catch (const ParseError&) {
            }
            pos_ = save;
        }
        if (peek().kind == Token::Id && !keywords.count(peek().text) && toks_[pos_ + 1].kind == Token::Sym &&
            toks_[pos_ + 1].text == "(") {
            auto& t = peek();
            std::string name = ident("predicate");
            next();
            std::vector<TermP> args;
            if (!is_sym(")")) {
                do args.push_back(parse_term());
                while (accept(","));
            }
            expect(")");
            auto f = mk_pred(name, args);
            pred_uses_.push_back({name, args.size(), t.line, t.col});
            return f;
        }
        auto lhs = parse_term();
        if (accept("->")) {
            auto& t = peek();
            auto rec = ident("record name");
            if (record_name_.empty()) throw ParseError("points-to used but no data declaration", t.line, t.col);
            if (rec != record_name_) throw ParseError("unknown record " + rec, t.line, t.col);
            expect("{");
            std::vector<TermP> fs;
            if (!is_sym("}")) {
                do fs.push_back(parse_term());
                while (accept(","));
            }
            expect("}");
            if (fs.size() != shape_.size())
                throw ParseError("points-to has " + std::to_string(fs.size()) + " fields, record has " +
                                     std::to_string(shape_.size()),
                                 t.line, t.col);
            return mk_pto(lhs, fs);
        }
        if (!is_relop()) fail("expected relation or '->'");
        std::string op = next().text;
        auto rhs = parse_term();
        if (op == "=") return mk_eq(lhs, rhs);
        if (op == "!=") return mk_neq(lhs, rhs);
        if (op == "<") return mk_lt(lhs, rhs);
        if (op == ">") return mk_lt(rhs, lhs);
        if (op == ">=") return mk_not_lt(lhs, rhs);
        return mk_not_lt(rhs, lhs);  // <=
    }
    bool is_relop() const {
        return is_sym("=") || is_sym("!=") || is_sym("<") || is_sym("<=") || is_sym(">") || is_sym(">=");
    }

    TermP parse_term() {
        auto t = parse_primary();
        while (is_sym("+") || is_sym("-")) {
            bool minus = next().text == "-";
            if (minus) {
                if (peek().kind != Token::Int) fail("only integer literals may be subtracted");
                t = mk_add(t, mk_lit(-next().value));
            } else {
                t = mk_add(t, parse_primary());
            }
        }
        return t;
    }
    TermP parse_primary() {
        if (peek().kind == Token::Int) return mk_lit(next().value);
        if (accept("-")) {
            if (peek().kind != Token::Int) fail("expected integer literal after '-'");
            return mk_lit(-next().value);
        }
        if (accept("(")) {
            auto t = parse_term();
            expect(")");
            return t;
        }
        if (is_kw("nil")) {
            next();
            return nil_term();
        }
        auto& tok = peek();
        auto n = ident("term");
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto f = it->find(n);
            if (f != it->end()) return mk_var(f->second, Sort::Loc);
        }
        if (!in_query_) throw ParseError("unbound variable " + n + " in predicate " + current_pred_, tok.line, tok.col);
        std::string key = "c:" + n;
        display_[key] = n;
        return mk_var(key, Sort::Loc);
    }

    struct PredUse {
        std::string name;
        size_t arity;
        int line, col;
    };
    std::vector<PredUse> pred_uses_;

    // ---- sort constraints ----
    std::string term_class(const TermP& t, int line, int col) {
        switch (t->kind) {
            case Term::Lit: return "INT";
            case Term::Add:
                for (auto& a : t->args) unify(term_class(a, line, col), "INT", line, col);
                return "INT";
            case Term::Const: return "LOC";  // nil
            case Term::Var: return t->name;
            default: return "LOC";
        }
    }
    void unify(const std::string& a, const std::string& b, int line, int col) {
        if (!uf_.unite(a, b)) throw ParseError("sort error: loc/int mismatch", line, col);
    }
    void constrain(const FormulaP& f, int line, int col) {
        switch (f->kind) {
            case Formula::Eq:
            case Formula::Neq:
                unify(term_class(f->terms[0], line, col), term_class(f->terms[1], line, col), line, col);
                break;
            case Formula::Lt:
            case Formula::NotLt:
                for (auto& t : f->terms) unify(term_class(t, line, col), "INT", line, col);
                break;
            case Formula::PointsTo:
                unify(term_class(f->terms[0], line, col), "LOC", line, col);
                for (size_t i = 0; i < shape_.size(); ++i)
                    unify(term_class(f->terms[i + 1], line, col), shape_[i] == Sort::Int ? "INT" : "LOC", line, col);
                break;
            case Formula::Pred: {
                auto it = pred_arity_.find(f->pred);
                if (it == pred_arity_.end()) throw ParseError("sort error: undeclared predicate " + f->pred, line, col);
                if (it->second != f->terms.size())
                    throw ParseError("sort error: predicate " + f->pred + " expects " + std::to_string(it->second) +
                                         " arguments",
                                     line, col);
                for (size_t i = 0; i < f->terms.size(); ++i)
                    unify(term_class(f->terms[i], line, col), f->pred + "#" + std::to_string(i), line, col);
                break;
            }
            default:
                for (auto& k : f->kids) constrain(k, line, col);
        }
    }

    TermP fin_term(const TermP& t) {
        switch (t->kind) {
            case Term::Var: {
                Sort s = uf_.sort_of(t->name);
                if (t->name.rfind("c:", 0) == 0) return mk_const(display_[t->name], s);
                return mk_var(display_[t->name], s);
            }
            case Term::Add: return mk_add(fin_term(t->args[0]), fin_term(t->args[1]));
            default: return t;
        }
    }
    FormulaP finalize(const FormulaP& f) {
        auto r = std::make_shared<Formula>(*f);
        for (auto& t : r->terms) t = fin_term(t);
        for (auto& k : r->kids) k = finalize(k);
        for (auto& v : r->vars) {
            v.sort = uf_.sort_of(v.name);
            v.name = display_[v.name];
        }
        return r;
    }

    // Pull existentials out of * and & so each disjunct becomes ∃y.ρ.
    // Same-named existentials of different cases share one y.
    FormulaP prenex(const FormulaP& f, std::vector<VarDecl>& ex, const std::set<std::string>& params,
                    std::set<std::string>& here) {
        if (f->kind == Formula::Exists) {
            Subst s;
            for (auto& v : f->vars) {
                std::string name = v.name;
                auto clash = [&](const std::string& n) {
                    if (params.count(n) || here.count(n)) return true;
                    for (auto& e : ex)
                        if (e.name == n && e.sort != v.sort) return true;
                    return false;
                };
                for (int n = 1; clash(name); ++n) name = v.name + "_" + std::to_string(n);
                if (name != v.name) s[v.name] = mk_var(name, v.sort);
                bool have = false;
                for (auto& e : ex)
                    if (e.name == name) have = true;
                if (!have) ex.push_back({name, v.sort});
                here.insert(name);
            }
            return prenex(subst(f->kids[0], s), ex, params, here);
        }
        if (f->kind == Formula::Sep || f->kind == Formula::And) {
            std::vector<FormulaP> ks;
            for (auto& k : f->kids) ks.push_back(prenex(k, ex, params, here));
            return mk_nary(f->kind, ks);
        }
        return f;
    }

    PredDef make_def(const RawPred& rp) {
        PredDef d;
        d.name = rp.name;
        std::set<std::string> taken;
        for (size_t i = 0; i < rp.param_names.size(); ++i) {
            d.params.push_back({rp.param_names[i], uf_.sort_of(rp.name + "#" + std::to_string(i))});
            taken.insert(rp.param_names[i]);
        }
        auto body = finalize(rp.body);
        // ∃y.(A ∨ B) and ∃ inside individual disjuncts both become cases over y.
        std::vector<VarDecl> outer;
        while (body->kind == Formula::Exists) {
            for (auto& v : body->vars) outer.push_back(v);
            body = body->kids[0];
        }
        d.exists = outer;
        std::vector<FormulaP> disj = body->kind == Formula::Or ? body->kids : std::vector<FormulaP>{body};
        for (auto& c : disj) {
            std::set<std::string> here;
            for (auto& v : outer) here.insert(v.name);
            d.cases.push_back(prenex(c, d.exists, taken, here));
        }
        return d;
    }
};

// ---- printing ---------------------------------------------------------------

int prec(const FormulaP& f) {
    switch (f->kind) {
        case Formula::Implies: return 0;
        case Formula::Or: return 1;
        case Formula::And: return 2;
        case Formula::Sep: return 3;
        case Formula::Exists:
        case Formula::Forall: return -1;
        default: return 5;
    }
}

std::string print_term(const TermP& t, bool nested) {
    switch (t->kind) {
        case Term::Const:
        case Term::Var: return t->name;
        case Term::Lit: return std::to_string(t->value);
        case Term::Add: {
            auto s = print_term(t->args[0], false) + " + " + print_term(t->args[1], true);
            return nested ? "(" + s + ")" : s;
        }
        case Term::Field: return "field" + std::to_string(t->value) + "(" + print_term(t->args[0], false) + ")";
    }
    return "?";
}

std::string binder(const VarDecl& v) { return v.sort == Sort::Int ? v.name + ":int" : v.name; }

std::string print_f(const FormulaP& f, const std::string& rec);

std::string child(const FormulaP& k, int parent_prec, const std::string& rec, bool last) {
    int p = prec(k);
    bool paren = (p >= 0 && p <= parent_prec) || (p < 0 && !last);
    auto s = print_f(k, rec);
    return paren ? "(" + s + ")" : s;
}

std::string print_f(const FormulaP& f, const std::string& rec) {
    auto T = [](const TermP& t) { return print_term(t, false); };
    switch (f->kind) {
        case Formula::Eq: return T(f->terms[0]) + " = " + T(f->terms[1]);
        case Formula::Neq: return T(f->terms[0]) + " != " + T(f->terms[1]);
        case Formula::Lt: return T(f->terms[0]) + " < " + T(f->terms[1]);
        case Formula::NotLt: return T(f->terms[0]) + " >= " + T(f->terms[1]);
        case Formula::Emp: return "emp";
        case Formula::PointsTo: {
            std::string s = T(f->terms[0]) + "->" + rec + "{";
            for (size_t i = 1; i < f->terms.size(); ++i) s += (i > 1 ? "," : "") + T(f->terms[i]);
            return s + "}";
        }
        case Formula::Pred: {
            std::string s = f->pred + "(";
            for (size_t i = 0; i < f->terms.size(); ++i) s += (i ? "," : "") + T(f->terms[i]);
            return s + ")";
        }
        case Formula::Or:
        case Formula::And:
        case Formula::Sep: {
            const char* op = f->kind == Formula::Or ? " \\/ " : f->kind == Formula::And ? " & " : " * ";
            std::string s;
            for (size_t i = 0; i < f->kids.size(); ++i) {
                if (i) s += op;
                s += child(f->kids[i], prec(f), rec, false);
            }
            return s;
        }
        case Formula::Implies:
            return child(f->kids[0], 0, rec, false) + " => " + child(f->kids[1], -1, rec, true);
        case Formula::Exists:
        case Formula::Forall: {
            std::string s = f->kind == Formula::Exists ? "exists " : "forall ";
            for (size_t i = 0; i < f->vars.size(); ++i) s += (i ? ", " : "") + binder(f->vars[i]);
            return s + ". " + print_f(f->kids[0], rec);
        }
    }
    return "?";
}

thread_local std::string g_record = "node";

}  // namespace

Problem parse_problem(const std::string& text, bool allow_reserved) {
    return Parser(text, allow_reserved).run();
}

Problem parse_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str());
}

std::string print(const TermP& t) { return print_term(t, false); }
std::string print(const FormulaP& f) { return print_f(f, g_record); }
std::string print(const FormulaP& f, const std::string& record) { return print_f(f, record); }

std::string print(const PredDef& d) {
    std::string s = "pred " + d.name + "(";
    for (size_t i = 0; i < d.params.size(); ++i) s += (i ? ", " : "") + binder(d.params[i]);
    s += ") := ";
    for (size_t j = 0; j < d.cases.size(); ++j) {
        if (j) s += " \\/ ";
        auto fv = free_vars(d.cases[j]);
        std::vector<VarDecl> ex;
        for (auto& v : d.exists)
            if (fv.count(v.name)) ex.push_back(v);
        auto body = print_f(d.cases[j], g_record);
        if (!ex.empty()) {
            std::string q = "exists ";
            for (size_t i = 0; i < ex.size(); ++i) q += (i ? ", " : "") + binder(ex[i]);
            body = q + ". " + body;
        }
        bool paren = (d.cases.size() > 1 && (prec(d.cases[j]) <= 1 || !ex.empty()));
        s += paren ? "(" + body + ")" : body;
    }
    return s + ";";
}

std::string print(const Problem& p) {
    std::string saved = g_record;
    g_record = p.vocab.record_name;
    std::string s;
    if (!p.vocab.record_shape.empty()) {
        s += "data " + p.vocab.record_name + " {";
        for (size_t i = 0; i < p.vocab.record_shape.size(); ++i) {
            s += " ";
            s += p.vocab.record_shape[i] == Sort::Int ? "int" : p.vocab.record_name;
            s += " " + (i < p.vocab.field_names.size() ? p.vocab.field_names[i] : "f" + std::to_string(i + 1)) + ";";
        }
        s += " };\n";
    }
    for (auto& d : p.sid.defs) s += print(d) + "\n";
    s += "checkentail ";
    for (size_t i = 0; i < p.antecedents.size(); ++i) s += (i ? ", " : "") + print(p.antecedents[i]);
    s += " |- " + print(p.consequent) + ";\n";
    g_record = saved;
    return s;
}

bool problem_equal(const Problem& a, const Problem& b) {
    if (a.vocab.record_shape != b.vocab.record_shape) return false;
    if (a.program_constants != b.program_constants) return false;
    if (a.sid.defs.size() != b.sid.defs.size() || a.antecedents.size() != b.antecedents.size()) return false;
    for (size_t i = 0; i < a.sid.defs.size(); ++i) {
        auto &x = a.sid.defs[i], &y = b.sid.defs[i];
        if (x.name != y.name || x.params != y.params || x.cases.size() != y.cases.size()) return false;
        for (size_t j = 0; j < x.cases.size(); ++j) {
            auto wx = mk_exists(x.exists, x.cases[j]);
            auto wy = mk_exists(y.exists, y.cases[j]);
            // Compare each case closed under the variables it actually uses.
            std::vector<VarDecl> ex, ey;
            auto fx = free_vars(x.cases[j]), fy = free_vars(y.cases[j]);
            for (auto& v : x.exists)
                if (fx.count(v.name)) ex.push_back(v);
            for (auto& v : y.exists)
                if (fy.count(v.name)) ey.push_back(v);
            if (!alpha_equal(mk_exists(ex, x.cases[j]), mk_exists(ey, y.cases[j]))) return false;
        }
    }
    for (size_t i = 0; i < a.antecedents.size(); ++i)
        if (!alpha_equal(a.antecedents[i], b.antecedents[i])) return false;
    return alpha_equal(a.consequent, b.consequent);
}

}  // namespace wsl
