#pragma once

#include <stdexcept>

#include "wsl/sl.hpp"

namespace wsl {

struct NormalizedEntailment {
    FormulaP antecedent;  // universal-conjunctive
    std::vector<VarDecl> consequent_exists;
    std::vector<FormulaP> consequent_disjuncts;
    std::map<std::string, Sort> skolems;
};

struct SkolemResult {
    std::vector<FormulaP> formulas;
    std::map<std::string, Sort> constants;
    int next_fresh = 0;
};

struct SplitLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fresh constants are named _sk<n> starting from `fresh`.
SkolemResult skolemize(const std::vector<FormulaP>& gamma, int fresh = 0);

std::vector<NormalizedEntailment> split_entailment(const SkolemResult& gamma, const FormulaP& psi,
                                                   size_t limit = 4096);

}  // namespace wsl
