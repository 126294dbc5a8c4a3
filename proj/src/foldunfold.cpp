#include "wsl/foldunfold.hpp"

#include <functional>

#include "json.hpp"
#include "wsl/normalize.hpp"

namespace wsl {

namespace {

using Clock = std::chrono::steady_clock;

std::string atom_key(const std::string& pred, const std::vector<TermP>& args) {
    std::string k = pred + "(";
    for (auto& a : args) k += print(a) + ",";
    return k + ")";
}

void collect_atoms(const FormulaP& f, std::set<std::string>& out) {
    if (f->kind == Formula::Pred) {
        for (auto& t : f->terms)
            if (t->kind != Term::Const) return;
        out.insert(atom_key(f->pred, f->terms));
        return;
    }
    for (auto& k : f->kids) collect_atoms(k, out);
}

void for_each_tuple(const std::vector<Sort>& sorts, const std::map<Sort, std::vector<TermP>>& u,
                    const std::function<void(const std::vector<TermP>&)>& fn) {
    std::vector<TermP> cur;
    std::function<void(size_t)> rec = [&](size_t i) {
        if (i == sorts.size()) {
            fn(cur);
            return;
        }
        auto it = u.find(sorts[i]);
        if (it == u.end()) return;
        for (auto& t : it->second) {
            cur.push_back(t);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
}

std::vector<Sort> sorts_of(const std::vector<VarDecl>& vs) {
    std::vector<Sort> out;
    for (auto& v : vs) out.push_back(v.sort);
    return out;
}

struct SplitSearch {
    const NormalizedEntailment& e;
    const Problem& p;
    const FoldUnfoldOptions& opts;
    Clock::time_point deadline;
    int& fresh;

    std::chrono::milliseconds remaining() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    }

    SolverVerdict query(const std::vector<FoldUnfoldAxiom>& axs, bool core, size_t* base) {
        auto o = encode_entailment(e, p.sid, p.vocab, {false, true});
        if (base) *base = o.assertions.size();
        add_axioms(o, axs);
        return check(o, remaining(), opts.cfg, opts.cancel, false, core);
    }

    // Deletion-based minimization of an unsatisfiable axiom set.
    std::vector<FoldUnfoldAxiom> minimize(std::vector<FoldUnfoldAxiom> axs) {
        for (size_t i = axs.size(); i-- > 0;) {
            auto trial = axs;
            trial.erase(trial.begin() + long(i));
            auto v = query(trial, false, nullptr);
            if (v.kind == SolverVerdict::Unsat) axs = trial;
            else if (v.kind == SolverVerdict::Unknown) break;
        }
        return axs;
    }

    FoldUnfoldResult run(std::vector<FoldUnfoldAxiom>& proof, int& round_used, size_t& tried) {
        FoldUnfoldResult r;
        std::map<Sort, std::vector<TermP>> universe;
        std::set<std::string> seen_consts;
        auto add_const = [&](const std::string& c, Sort s) {
            if (seen_consts.insert(c).second) universe[s].push_back(mk_const(c, s));
        };
        add_const("nil", Sort::Loc);
        for (auto& [c, s] : typed_constants_of(e.antecedent)) add_const(c, s);
        for (auto& d : e.consequent_disjuncts)
            for (auto& [c, s] : typed_constants_of(d)) add_const(c, s);
        for (auto& [c, s] : e.skolems) add_const(c, s);

        std::set<std::string> relevant;
        collect_atoms(e.antecedent, relevant);
        std::set<std::string> roots = preds_of(e.antecedent);
        for (auto& d : e.consequent_disjuncts)
            for (auto& q : preds_of(d)) roots.insert(q);
        auto reach = reachable_preds(p.sid, roots);

        std::vector<FoldUnfoldAxiom> axs;
        std::set<std::string> unfolded, folded;
        for (int round = 1; round <= opts.budget; ++round) {
            std::vector<std::pair<std::string, Sort>> grow;
            for (auto& d : p.sid.defs) {
                if (!reach.count(d.name)) continue;
                for_each_tuple(sorts_of(d.params), universe, [&](const std::vector<TermP>& args) {
                    auto k = atom_key(d.name, args);
                    if (!unfolded.insert(k).second) return;
                    std::vector<TermP> fr;
                    for (auto& v : d.exists) fr.push_back(mk_const("_c" + std::to_string(fresh++), v.sort));
                    auto ax = encode_unfold_axiom(p.sid, d.name, args, fr);
                    if (relevant.count(k)) {
                        for (auto& c : fr) grow.push_back({c->name, c->sort});
                        collect_atoms(ax.sl, relevant);
                    }
                    axs.push_back(std::move(ax));
                });
                for_each_tuple(sorts_of(d.params), universe, [&](const std::vector<TermP>& args) {
                    for_each_tuple(sorts_of(d.exists), universe, [&](const std::vector<TermP>& ws) {
                        auto k = atom_key(d.name, args) + atom_key("", ws);
                        if (!folded.insert(k).second) return;
                        axs.push_back(encode_fold_axiom(p.sid, d.name, args, ws));
                    });
                });
            }
            tried = axs.size();
            if (axs.size() > opts.max_axioms) {
                r.kind = FoldUnfoldResult::Unknown;
                r.reason = "axiom limit";
                return r;
            }
            size_t base = 0;
            auto v = query(axs, true, &base);
            if (v.kind == SolverVerdict::Unsat) {
                std::vector<FoldUnfoldAxiom> used;
                if (v.core) {
                    for (auto i : *v.core)
                        if (i >= base && i - base < axs.size()) used.push_back(axs[i - base]);
                } else {
                    used = axs;
                }
                proof = opts.minimize ? minimize(used) : used;
                round_used = round;
                r.kind = FoldUnfoldResult::Proved;
                return r;
            }
            if (v.kind == SolverVerdict::Unknown) {
                r.kind = FoldUnfoldResult::Unknown;
                r.reason = v.reason;
                return r;
            }
            for (auto& [c, s] : grow) add_const(c, s);
        }
        r.kind = FoldUnfoldResult::Exhausted;
        r.reason = "budget exhausted";
        return r;
    }
};

}  // namespace

FoldUnfoldResult fold_unfold(const Problem& p, const FoldUnfoldOptions& opts) {
    auto deadline = Clock::now() + opts.timeout;
    auto sk = skolemize(p.antecedents);
    auto splits = split_entailment(sk, p.consequent);
    FoldUnfoldResult out;
    out.kind = FoldUnfoldResult::Proved;
    out.proof.splits = splits.size();
    int fresh = 0;
    for (size_t i = 0; i < splits.size(); ++i) {
        SplitSearch s{splits[i], p, opts, deadline, fresh};
        std::vector<FoldUnfoldAxiom> used;
        int round = 0;
        size_t tried = 0;
        auto r = s.run(used, round, tried);
        out.axioms_tried += tried;
        if (r.kind != FoldUnfoldResult::Proved) {
            r.axioms_tried = out.axioms_tried;
            return r;
        }
        out.proof.rounds = std::max(out.proof.rounds, round);
        for (auto& a : used) out.proof.axioms.push_back({i, a});
    }
    return out;
}

std::string proof_to_json(const ProofObject& p, const std::string& record) {
    nlohmann::json j;
    j["splits"] = p.splits;
    j["rounds"] = p.rounds;
    j["axioms"] = nlohmann::json::array();
    for (auto& s : p.axioms)
        j["axioms"].push_back({{"split", s.split},
                               {"kind", s.axiom.kind == FoldUnfoldAxiom::Fold ? "fold" : "unfold"},
                               {"predicate", s.axiom.pred},
                               {"formula", print(s.axiom.sl, record)}});
    return j.dump(2);
}

}  // namespace wsl
