#include "wsl/normalize.hpp"

namespace wsl {

SkolemResult skolemize(const std::vector<FormulaP>& gamma, int fresh) {
    SkolemResult r;
    for (auto f : gamma) {
        while (f->kind == Formula::Exists) {
            Subst s;
            for (auto& v : f->vars) {
                std::string name = "_sk" + std::to_string(fresh++);
                s[v.name] = mk_const(name, v.sort);
                r.constants[name] = v.sort;
            }
            f = subst(f->kids[0], s);
        }
        r.formulas.push_back(f);
    }
    r.next_fresh = fresh;
    return r;
}

std::vector<NormalizedEntailment> split_entailment(const SkolemResult& gamma, const FormulaP& psi, size_t limit) {
    std::vector<std::vector<FormulaP>> choices;
    size_t total = 1;
    for (auto& g : gamma.formulas) {
        std::vector<FormulaP> ds = g->kind == Formula::Or ? g->kids : std::vector<FormulaP>{g};
        total *= ds.size();
        if (total > limit)
            throw SplitLimitError("antecedent splits into more than " + std::to_string(limit) + " disjuncts");
        choices.push_back(ds);
    }
    NormalizedEntailment base;
    base.skolems = gamma.constants;
    FormulaP q = psi;
    while (q->kind == Formula::Exists) {
        base.consequent_exists.insert(base.consequent_exists.end(), q->vars.begin(), q->vars.end());
        q = q->kids[0];
    }
    base.consequent_disjuncts = q->kind == Formula::Or ? q->kids : std::vector<FormulaP>{q};

    std::vector<NormalizedEntailment> out;
    std::vector<size_t> idx(choices.size(), 0);
    while (true) {
        std::vector<FormulaP> parts;
        for (size_t i = 0; i < choices.size(); ++i) parts.push_back(choices[i][idx[i]]);
        NormalizedEntailment e = base;
        e.antecedent = parts.empty() ? mk_emp() : mk_and(parts);
        out.push_back(e);
        size_t k = 0;
        while (k < idx.size() && ++idx[k] == choices[k].size()) idx[k++] = 0;
        if (k == idx.size()) break;
    }
    return out;
}

}  // namespace wsl
