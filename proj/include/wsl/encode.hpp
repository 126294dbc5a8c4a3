#pragma once

#include "wsl/fo.hpp"
#include "wsl/normalize.hpp"
#include "wsl/sl.hpp"

namespace wsl {

// Name of the distinguished heaplet variable x*.
inline const std::string kHeapletVar = "_xs";

struct EncodedFormula {
    fo::FormulaP fo;
    fo::FormulaP eta;  // free in kHeapletVar
};

fo::TermP encode_term(const TermP& t);

// Table 1 translation of a universal-conjunctive formula.
EncodedFormula encode_uc(const FormulaP& phi);

// One sentence per predicate; conjoined they form Φ_fo.
std::vector<fo::FormulaP> encode_sid_parts(const SID& sid, const std::set<std::string>& only = {});
fo::FormulaP encode_sid(const SID& sid);

struct EncodeOptions {
    bool include_sid = true;
    bool inline_points_to = true;
};

fo::Signature make_signature(const Vocabulary& vocab, const SID& sid);

fo::Obligation encode_entailment(const NormalizedEntailment& e, const SID& sid, const Vocabulary& vocab,
                                 const EncodeOptions& opts = {});

struct FoldUnfoldAxiom {
    enum Kind { Fold, Unfold } kind;
    std::string pred;
    std::vector<TermP> args;
    std::vector<TermP> witnesses;                    // fold: y-terms; unfold: fresh constants
    std::map<std::string, Sort> fresh_constants;     // unfold only
    FormulaP sl;
    fo::FormulaP fo;
};

FoldUnfoldAxiom encode_fold_axiom(const SID& sid, const std::string& pred, const std::vector<TermP>& args,
                                  const std::vector<TermP>& witnesses);
FoldUnfoldAxiom encode_unfold_axiom(const SID& sid, const std::string& pred, const std::vector<TermP>& args,
                                    const std::vector<TermP>& fresh);

// ∃u.(… * t↦⟨…u…⟩ * …) becomes (… * t↦⟨…field_i(t)…⟩ * …).
FormulaP inline_points_to_existentials(const FormulaP& phi);
SID inline_sid(const SID& sid);

// Appends axiom sentences to an obligation and extends its signature.
void add_axioms(fo::Obligation& o, const std::vector<FoldUnfoldAxiom>& axioms);

}  // namespace wsl
