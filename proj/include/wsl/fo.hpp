#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "wsl/sl.hpp"

namespace wsl::fo {

struct Term;
using TermP = std::shared_ptr<const Term>;

struct Term {
    enum Kind { Const, Var, Lit, Add, App };
    Kind kind;
    Sort sort;
    std::string name;  // constant, variable or function symbol
    long long value = 0;
    std::vector<TermP> args;
};

TermP cnst(const std::string& name, Sort s);
TermP var(const std::string& name, Sort s);
TermP lit(long long v);
TermP add(TermP a, TermP b);
TermP app(const std::string& fn, TermP arg, Sort result);
TermP nil();

bool term_equal(const TermP& a, const TermP& b);

struct Formula;
using FormulaP = std::shared_ptr<const Formula>;

struct Formula {
    enum Kind { True, False, Eq, Lt, Rel, Not, And, Or, Implies, Iff, Forall, Exists };
    Kind kind;
    std::string name;  // relation symbol
    std::vector<TermP> terms;
    std::vector<FormulaP> kids;
    std::vector<VarDecl> vars;
};

// Smart constructors fold ⊤/⊥ and trivial equalities.
FormulaP top();
FormulaP bot();
FormulaP eq(TermP a, TermP b);
FormulaP neq(TermP a, TermP b);
FormulaP lt(TermP a, TermP b);
FormulaP le(TermP a, TermP b);
FormulaP rel(const std::string& name, std::vector<TermP> args);
FormulaP neg(FormulaP a);
FormulaP conj(std::vector<FormulaP> ks);
FormulaP disj(std::vector<FormulaP> ks);
FormulaP implies(FormulaP a, FormulaP b);
FormulaP iff(FormulaP a, FormulaP b);
FormulaP forall(std::vector<VarDecl> vs, FormulaP body);
FormulaP exists(std::vector<VarDecl> vs, FormulaP body);

bool formula_equal(const FormulaP& a, const FormulaP& b);
std::set<std::string> free_vars(const FormulaP& f);
using Subst = std::map<std::string, TermP>;
TermP subst_term(const TermP& t, const Subst& s);
FormulaP subst(const FormulaP& f, const Subst& s);
bool mentions_int_quantifier(const FormulaP& f);

std::string to_string(const TermP& t);
std::string to_string(const FormulaP& f);
// Variables printed without the '?' prefix; used for stored LIA text.
std::string to_lia_string(const TermP& t);
std::string to_lia_string(const FormulaP& f);

struct Signature {
    std::vector<Sort> fields;                           // m1..mn result sorts
    std::map<std::string, Sort> constants;              // includes nil
    std::map<std::string, std::vector<Sort>> relations;  // P_fo and P_eta
};

std::string field_fn(int index);  // "m<index>", 1-based
std::string fo_rel(const std::string& pred);
std::string eta_rel(const std::string& pred);

enum class Tag { Sid, Antecedent, Refutation, Axiom };
const char* tag_name(Tag t);

struct Assertion {
    FormulaP formula;
    Tag tag;
    std::string label;
};

struct Obligation {
    Signature sig;
    std::vector<Assertion> assertions;
    bool has_theory = false;
};

}  // namespace wsl::fo
