#include "wsl/finite.hpp"

#include <algorithm>
#include <functional>

namespace wsl {

namespace {

Heaplet bit(long long l) { return Heaplet(1) << l; }

Heaplet all_heaplets_mask(int num_locs) { return ((Heaplet(1) << num_locs) - 1) & ~Heaplet(1); }

// Every subset of `mask`, including the empty one.
template <class F>
bool for_subsets(Heaplet mask, F&& f) {
    Heaplet s = mask;
    while (true) {
        if (f(s)) return true;
        if (s == 0) return false;
        s = (s - 1) & mask;
    }
}

std::vector<Value> carrier(Sort s, int num_locs, const std::vector<long long>& ints, bool exhaustive) {
    std::vector<Value> out;
    if (s == Sort::Loc) {
        for (int l = 0; l < num_locs; ++l) out.push_back(loc(l));
    } else {
        if (!exhaustive) throw UnboundedIntError("quantifier over int with a non-exhaustive integer slice");
        for (auto i : ints) out.push_back(ival(i));
    }
    return out;
}

bool sat(const HeapStructure& m, Assignment& v, Heaplet eta, const FormulaP& f);

bool sat_sep(const HeapStructure& m, Assignment& v, Heaplet eta, const std::vector<FormulaP>& ks, size_t i) {
    if (i + 1 == ks.size()) return sat(m, v, eta, ks[i]);
    return for_subsets(eta, [&](Heaplet part) {
        return sat(m, v, part, ks[i]) && sat_sep(m, v, eta & ~part, ks, i + 1);
    });
}

bool sat_quant(const HeapStructure& m, Assignment& v, Heaplet eta, const FormulaP& f, size_t i) {
    if (i == f->vars.size()) return sat(m, v, eta, f->kids[0]);
    auto& x = f->vars[i];
    bool ex = f->kind == Formula::Exists;
    auto saved = v.find(x.name) != v.end() ? std::optional<Value>(v[x.name]) : std::nullopt;
    bool result = !ex;
    for (auto d : carrier(x.sort, m.num_locs, m.ints, m.ints_exhaustive)) {
        v[x.name] = d;
        bool r = sat_quant(m, v, eta, f, i + 1);
        if (ex && r) {
            result = true;
            break;
        }
        if (!ex && !r) {
            result = false;
            break;
        }
    }
    if (saved)
        v[x.name] = *saved;
    else
        v.erase(x.name);
    return result;
}

bool sat(const HeapStructure& m, Assignment& v, Heaplet eta, const FormulaP& f) {
    switch (f->kind) {
        case Formula::Eq: return eta == 0 && eval_term(m, v, f->terms[0]) == eval_term(m, v, f->terms[1]);
        case Formula::Neq: return eta == 0 && eval_term(m, v, f->terms[0]) != eval_term(m, v, f->terms[1]);
        case Formula::Lt: return eta == 0 && eval_term(m, v, f->terms[0]).v < eval_term(m, v, f->terms[1]).v;
        case Formula::NotLt: return eta == 0 && !(eval_term(m, v, f->terms[0]).v < eval_term(m, v, f->terms[1]).v);
        case Formula::Emp: return eta == 0;
        case Formula::PointsTo: {
            auto r = eval_term(m, v, f->terms[0]);
            if (r.v == 0 || eta != bit(r.v)) return false;
            auto& rec = m.heap.at(r.v);
            for (size_t i = 1; i < f->terms.size(); ++i)
                if (rec.at(i - 1) != eval_term(m, v, f->terms[i])) return false;
            return true;
        }
        case Formula::Pred: {
            std::vector<Value> tup;
            for (auto& t : f->terms) tup.push_back(eval_term(m, v, t));
            auto it = m.preds.find(f->pred);
            return it != m.preds.end() && it->second.count({tup, eta});
        }
        case Formula::Or:
            for (auto& k : f->kids)
                if (sat(m, v, eta, k)) return true;
            return false;
        case Formula::And:
            for (auto& k : f->kids)
                if (!sat(m, v, eta, k)) return false;
            return true;
        case Formula::Sep: return sat_sep(m, v, eta, f->kids, 0);
        case Formula::Exists:
        case Formula::Forall: return sat_quant(m, v, eta, f, 0);
        case Formula::Implies: return !sat(m, v, eta, f->kids[0]) || sat(m, v, eta, f->kids[1]);
    }
    return false;
}

}  // namespace

Value eval_term(const HeapStructure& m, const Assignment& v, const TermP& t) {
    switch (t->kind) {
        case Term::Const: {
            if (t->name == "nil") return loc(0);
            auto it = m.consts.find(t->name);
            if (it == m.consts.end()) throw std::runtime_error("uninterpreted constant " + t->name);
            return it->second;
        }
        case Term::Var: {
            auto it = v.find(t->name);
            if (it == v.end()) throw std::runtime_error("unassigned variable " + t->name);
            return it->second;
        }
        case Term::Lit: return ival(t->value);
        case Term::Add: return ival(eval_term(m, v, t->args[0]).v + eval_term(m, v, t->args[1]).v);
        case Term::Field: {
            auto r = eval_term(m, v, t->args[0]);
            if (r.v == 0) return t->sort == Sort::Loc ? loc(0) : ival(0);
            return m.heap.at(r.v).at(t->value - 1);
        }
    }
    return {};
}

bool satisfies(const HeapStructure& m, const Assignment& v, Heaplet eta, const FormulaP& f) {
    Assignment w = v;
    return sat(m, w, eta, f);
}

std::map<std::string, std::set<std::pair<std::vector<Value>, Heaplet>>> transform(const HeapStructure& m,
                                                                                  const SID& sid) {
    std::map<std::string, std::set<std::pair<std::vector<Value>, Heaplet>>> out;
    Heaplet all = all_heaplets_mask(m.num_locs);
    for (auto& d : sid.defs) {
        auto& dst = out[d.name];
        std::vector<std::vector<Value>> params;
        for (auto& p : d.params) params.push_back(carrier(p.sort, m.num_locs, m.ints, m.ints_exhaustive));
        std::vector<size_t> idx(d.params.size(), 0);
        auto body = mk_exists(d.exists, mk_or(d.cases.empty() ? std::vector<FormulaP>{} : d.cases));
        bool no_cases = d.cases.empty();
        while (true) {
            if (!no_cases) {
                Assignment v;
                std::vector<Value> tup;
                for (size_t i = 0; i < idx.size(); ++i) {
                    v[d.params[i].name] = params[i][idx[i]];
                    tup.push_back(params[i][idx[i]]);
                }
                for_subsets(all, [&](Heaplet eta) {
                    if (satisfies(m, v, eta, body)) dst.insert({tup, eta});
                    return false;
                });
            }
            size_t k = 0;
            while (k < idx.size() && ++idx[k] == params[k].size()) idx[k++] = 0;
            if (k == idx.size()) break;
        }
    }
    return out;
}

HeapStructure lfp_interpret(const HeapStructure& m0, const SID& sid, int* iterations) {
    HeapStructure m = m0;
    for (auto& d : sid.defs) m.preds[d.name].clear();
    int it = 0;
    while (true) {
        auto next = transform(m, sid);
        ++it;
        bool same = true;
        for (auto& d : sid.defs)
            if (next[d.name] != m.preds[d.name]) same = false;
        if (same) break;
        for (auto& [k, s] : next) m.preds[k] = s;
    }
    if (iterations) *iterations = it;
    return m;
}

bool is_fixpoint(const HeapStructure& m, const SID& sid) {
    auto next = transform(m, sid);
    for (auto& d : sid.defs) {
        auto it = m.preds.find(d.name);
        static const std::set<std::pair<std::vector<Value>, Heaplet>> empty;
        if (next[d.name] != (it == m.preds.end() ? empty : it->second)) return false;
    }
    return true;
}

bool is_determined_heap(const HeapStructure& m) {
    for (auto& [p, s] : m.preds) {
        const std::vector<Value>* prev = nullptr;
        for (auto& [tup, eta] : s) {
            if (prev && *prev == tup) return false;
            prev = &tup;
        }
    }
    return true;
}

// ---- bounded oracle --------------------------------------------------------

namespace {

void collect_pred_atoms(const FormulaP& f, std::vector<FormulaP>& out) {
    if (f->kind == Formula::Pred) out.push_back(f);
    for (auto& k : f->kids) collect_pred_atoms(k, out);
}

// Bound variables above each predicate atom.
void collect_atoms_scoped(const FormulaP& f, std::vector<VarDecl>& scope,
                          std::vector<std::pair<FormulaP, std::vector<VarDecl>>>& out) {
    if (f->kind == Formula::Pred) {
        out.push_back({f, scope});
        return;
    }
    size_t n = scope.size();
    scope.insert(scope.end(), f->vars.begin(), f->vars.end());
    for (auto& k : f->kids) collect_atoms_scoped(k, scope, out);
    scope.resize(n);
}

}  // namespace

OracleResult decide_qf_entailment(const std::vector<FormulaP>& gamma, const FormulaP& psi, int bound,
                                  const std::vector<FormulaP>& axioms, int num_fields, long long budget) {
    if (bound < 1 || bound > 6) throw std::invalid_argument("oracle bound must be in 1..6");
    std::vector<FormulaP> all = gamma;
    all.push_back(psi);
    all.insert(all.end(), axioms.begin(), axioms.end());
    std::vector<std::string> names;
    std::set<std::string> free_names;
    for (auto& f : all) {
        if (has_theory(f)) throw std::invalid_argument("oracle needs theory-free formulas");
        for (auto& c : constants_of(f))
            if (c != "nil") names.push_back(c);
        for (auto& x : free_vars(f)) {
            names.push_back(x);
            free_names.insert(x);
        }
    }
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());

    std::vector<std::pair<FormulaP, std::vector<VarDecl>>> atoms;
    for (auto& f : all) {
        std::vector<VarDecl> scope;
        collect_atoms_scoped(f, scope, atoms);
    }

    OracleResult res;
    res.bound = bound;
    int L = bound + 1;
    HeapStructure m;
    m.num_locs = L;
    m.heap.assign(L, std::vector<Value>(num_fields, loc(0)));
    Heaplet all_eta = all_heaplets_mask(L);
    int cells = (L - 1) * num_fields;
    std::vector<int> heap_idx(cells, 0);

    auto done = false;
    while (!done) {
        for (int c = 0; c < cells; ++c) m.heap[1 + c / num_fields][c % num_fields] = loc(heap_idx[c]);

        // canonical assignments of names to locations
        std::vector<int> asg(names.size(), 0);
        std::function<bool(size_t, int)> assign = [&](size_t i, int max_used) -> bool {
            if (i < names.size()) {
                for (int l = 0; l <= std::min(max_used + 1, L - 1); ++l) {
                    asg[i] = l;
                    if (assign(i + 1, std::max(max_used, l))) return true;
                }
                return false;
            }
            m.consts.clear();
            Assignment v;
            for (size_t k = 0; k < names.size(); ++k) {
                if (free_names.count(names[k]))
                    v[names[k]] = loc(asg[k]);
                else
                    m.consts[names[k]] = loc(asg[k]);
            }
            // relevant predicate tuples
            std::vector<std::pair<std::string, std::vector<Value>>> tuples;
            for (auto& [atom, scope] : atoms) {
                std::vector<size_t> qi(scope.size(), 0);
                while (true) {
                    Assignment w = v;
                    for (size_t j = 0; j < scope.size(); ++j) w[scope[j].name] = loc(qi[j]);
                    std::vector<Value> tup;
                    for (auto& t : atom->terms) tup.push_back(eval_term(m, w, t));
                    tuples.push_back({atom->pred, tup});
                    size_t k = 0;
                    while (k < qi.size() && ++qi[k] == size_t(L)) qi[k++] = 0;
                    if (k == qi.size()) break;
                }
            }
            std::sort(tuples.begin(), tuples.end());
            tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
            // choice per tuple: 0 = absent, h+1 = heaplet h
            std::vector<Heaplet> choice(tuples.size(), 0);
            std::vector<Heaplet> heaplets;
            for_subsets(all_eta, [&](Heaplet h) {
                heaplets.push_back(h);
                return false;
            });
            std::vector<size_t> ci(tuples.size(), 0);
            while (true) {
                if (++res.structures > budget) throw ResourceError("oracle enumeration budget exhausted");
                m.preds.clear();
                for (size_t k = 0; k < tuples.size(); ++k)
                    if (ci[k] > 0) m.preds[tuples[k].first].insert({tuples[k].second, heaplets[ci[k] - 1]});
                bool axioms_ok = true;
                for (auto& ax : axioms) {
                    for (auto h : heaplets)
                        if (!satisfies(m, v, h, ax)) {
                            axioms_ok = false;
                            break;
                        }
                    if (!axioms_ok) break;
                }
                if (axioms_ok) {
                    for (auto h : heaplets) {
                        bool ant = true;
                        for (auto& g : gamma)
                            if (!satisfies(m, v, h, g)) {
                                ant = false;
                                break;
                            }
                        if (ant && !satisfies(m, v, h, psi)) {
                            res.valid = false;
                            res.model = m;
                            res.assignment = v;
                            res.heaplet = h;
                            return true;
                        }
                    }
                }
                size_t k = 0;
                while (k < ci.size() && ++ci[k] == heaplets.size() + 1) ci[k++] = 0;
                if (k == ci.size()) break;
            }
            return false;
        };
        if (assign(0, 0)) return res;

        int c = 0;
        while (c < cells && ++heap_idx[c] == L) heap_idx[c++] = 0;
        if (c == cells) done = true;
    }
    return res;
}

// ---- first-order evaluation ------------------------------------------------

Value eval_fo_term(const FOStructure& m, const FOAssignment& v, const fo::TermP& t) {
    using K = fo::Term::Kind;
    switch (t->kind) {
        case K::Const: {
            auto it = m.consts.find(t->name);
            if (it == m.consts.end()) {
                if (t->name == "nil") return loc(0);
                throw std::runtime_error("uninterpreted constant " + t->name);
            }
            return it->second;
        }
        case K::Var: {
            auto it = v.find(t->name);
            if (it == v.end()) throw std::runtime_error("unassigned variable " + t->name);
            return it->second;
        }
        case K::Lit: return ival(t->value);
        case K::Add: return ival(eval_fo_term(m, v, t->args[0]).v + eval_fo_term(m, v, t->args[1]).v);
        case K::App: {
            int i = std::stoi(t->name.substr(1)) - 1;
            auto a = eval_fo_term(m, v, t->args[0]);
            return m.funcs.at(i).at(a.v);
        }
    }
    return {};
}

namespace {

bool fo_eval(const FOStructure& m, FOAssignment& v, const fo::FormulaP& f);

bool fo_quant(const FOStructure& m, FOAssignment& v, const fo::FormulaP& f, size_t i) {
    if (i == f->vars.size()) return fo_eval(m, v, f->kids[0]);
    auto& x = f->vars[i];
    bool ex = f->kind == fo::Formula::Exists;
    auto it = v.find(x.name);
    std::optional<Value> saved = it != v.end() ? std::optional<Value>(it->second) : std::nullopt;
    bool result = !ex;
    for (auto d : carrier(x.sort, m.num_locs, m.ints, m.ints_exhaustive)) {
        v[x.name] = d;
        bool r = fo_quant(m, v, f, i + 1);
        if (r == ex) {
            result = ex;
            break;
        }
    }
    if (saved)
        v[x.name] = *saved;
    else
        v.erase(x.name);
    return result;
}

bool fo_eval(const FOStructure& m, FOAssignment& v, const fo::FormulaP& f) {
    using K = fo::Formula::Kind;
    switch (f->kind) {
        case K::True: return true;
        case K::False: return false;
        case K::Eq: return eval_fo_term(m, v, f->terms[0]) == eval_fo_term(m, v, f->terms[1]);
        case K::Lt: return eval_fo_term(m, v, f->terms[0]).v < eval_fo_term(m, v, f->terms[1]).v;
        case K::Rel: {
            std::vector<Value> tup;
            for (auto& t : f->terms) tup.push_back(eval_fo_term(m, v, t));
            auto it = m.rels.find(f->name);
            return it != m.rels.end() && it->second.count(tup);
        }
        case K::Not: return !fo_eval(m, v, f->kids[0]);
        case K::And:
            for (auto& k : f->kids)
                if (!fo_eval(m, v, k)) return false;
            return true;
        case K::Or:
            for (auto& k : f->kids)
                if (fo_eval(m, v, k)) return true;
            return false;
        case K::Implies: return !fo_eval(m, v, f->kids[0]) || fo_eval(m, v, f->kids[1]);
        case K::Iff: return fo_eval(m, v, f->kids[0]) == fo_eval(m, v, f->kids[1]);
        case K::Forall:
        case K::Exists: return fo_quant(m, v, f, 0);
    }
    return false;
}

}  // namespace

bool eval_fo(const FOStructure& m, const FOAssignment& v, const fo::FormulaP& f) {
    FOAssignment w = v;
    return fo_eval(m, w, f);
}

FOStructure to_fo(const HeapStructure& m, const std::vector<Sort>& shape) {
    FOStructure r;
    r.num_locs = m.num_locs;
    r.ints = m.ints;
    r.ints_exhaustive = m.ints_exhaustive;
    r.consts = m.consts;
    r.consts["nil"] = loc(0);
    for (size_t i = 0; i < shape.size(); ++i) {
        std::vector<Value> f(m.num_locs, shape[i] == Sort::Loc ? loc(0) : ival(0));
        for (int l = 1; l < m.num_locs; ++l) f[l] = m.heap.at(l).at(i);
        r.funcs.push_back(f);
    }
    for (auto& [p, s] : m.preds) {
        auto& rf = r.rels[fo::fo_rel(p)];
        auto& re = r.rels[fo::eta_rel(p)];
        for (auto& [tup, eta] : s) {
            rf.insert(tup);
            for (int l = 1; l < m.num_locs; ++l)
                if (eta & bit(l)) {
                    auto t = tup;
                    t.push_back(loc(l));
                    re.insert(t);
                }
        }
    }
    return r;
}

Heaplet heaplet_of(const FOStructure& m, const FOAssignment& v, const fo::FormulaP& phi_eta,
                   const std::string& xs) {
    Heaplet h = 0;
    FOAssignment w = v;
    for (int l = 0; l < m.num_locs; ++l) {
        w[xs] = loc(l);
        if (eval_fo(m, w, phi_eta)) h |= bit(l);
    }
    return h;
}

}  // namespace wsl
