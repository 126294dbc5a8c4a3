#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace wsl {

enum class Sort { Loc, Int };

const char* sort_name(Sort s);

struct Term;
using TermP = std::shared_ptr<const Term>;

// Field terms field_i(t) only exist between inlining and encoding.
struct Term {
    enum Kind { Const, Var, Lit, Add, Field };
    Kind kind;
    Sort sort;
    std::string name;
    long long value = 0;  // literal value, or field index (1-based)
    std::vector<TermP> args;
};

TermP mk_const(const std::string& name, Sort s);
TermP mk_var(const std::string& name, Sort s);
TermP mk_lit(long long v);
TermP mk_add(TermP a, TermP b);
TermP mk_field(int index, TermP t, Sort s);
TermP nil_term();

bool term_equal(const TermP& a, const TermP& b);
bool term_less(const TermP& a, const TermP& b);

struct VarDecl {
    std::string name;
    Sort sort;
    bool operator==(const VarDecl&) const = default;
};

struct Formula;
using FormulaP = std::shared_ptr<const Formula>;

struct Formula {
    enum Kind { Eq, Neq, Lt, NotLt, Emp, PointsTo, Pred, Or, And, Sep, Exists, Forall, Implies };
    Kind kind;
    std::string pred;             // Pred
    std::vector<TermP> terms;     // atoms; PointsTo: root followed by fields
    std::vector<FormulaP> kids;   // connectives
    std::vector<VarDecl> vars;    // quantifiers
};

FormulaP mk_eq(TermP a, TermP b);
FormulaP mk_neq(TermP a, TermP b);
FormulaP mk_lt(TermP a, TermP b);
FormulaP mk_not_lt(TermP a, TermP b);
FormulaP mk_emp();
FormulaP mk_pto(TermP root, std::vector<TermP> fields);
FormulaP mk_pred(const std::string& p, std::vector<TermP> args);
FormulaP mk_nary(Formula::Kind k, std::vector<FormulaP> kids);
FormulaP mk_or(std::vector<FormulaP> kids);
FormulaP mk_and(std::vector<FormulaP> kids);
FormulaP mk_sep(std::vector<FormulaP> kids);
FormulaP mk_quant(Formula::Kind k, std::vector<VarDecl> vars, FormulaP body);
FormulaP mk_exists(std::vector<VarDecl> vars, FormulaP body);
FormulaP mk_forall(std::vector<VarDecl> vars, FormulaP body);
FormulaP mk_implies(FormulaP a, FormulaP b);

bool is_atom(const FormulaP& f);
bool is_pure_atom(const FormulaP& f);

bool formula_equal(const FormulaP& a, const FormulaP& b);
bool alpha_equal(const FormulaP& a, const FormulaP& b);

// Free variables (Var terms not bound by a quantifier).
std::set<std::string> free_vars(const FormulaP& f);
std::set<std::string> term_vars(const TermP& t);
std::set<std::string> constants_of(const FormulaP& f);
std::map<std::string, Sort> typed_constants_of(const FormulaP& f);
std::set<std::string> preds_of(const FormulaP& f);

using Subst = std::map<std::string, TermP>;
TermP subst_term(const TermP& t, const Subst& s);
// Capture-avoiding; bound variables are renamed when they would capture.
FormulaP subst(const FormulaP& f, const Subst& s);

bool has_theory(const FormulaP& f);  // int sort, literals, + or <
bool is_quantifier_free(const FormulaP& f);
bool is_conjunctive(const FormulaP& f);  // no Or, no Implies
bool is_qf_conjunctive(const FormulaP& f);
// Conjunctive with universal quantifiers only.
bool is_universal_conjunctive(const FormulaP& f);

// Flatten nested Sep nodes into their top-level conjuncts.
std::vector<FormulaP> sep_conjuncts(const FormulaP& f);

struct PredSig {
    std::string name;
    std::vector<Sort> params;
};

struct Vocabulary {
    std::vector<Sort> record_shape;
    std::string record_name = "node";
    std::vector<std::string> field_names;
    std::map<std::string, Sort> constants;  // includes nil
    std::map<std::string, PredSig> preds;
};

struct PredDef {
    std::string name;
    std::vector<VarDecl> params;
    std::vector<VarDecl> exists;
    std::vector<FormulaP> cases;
};

struct SID {
    std::vector<PredDef> defs;
    const PredDef* find(const std::string& name) const;
};

struct FragmentReport {
    bool verdict = true;
    std::string category;
    std::string witness;
};

FragmentReport check_edh(const FormulaP& f);
FragmentReport check_sid(const SID& sid);
FragmentReport check_heap_reducing(const SID& sid);

// Predicates reachable from the given ones through SID cases.
std::set<std::string> reachable_preds(const SID& sid, const std::set<std::string>& roots);

}  // namespace wsl
