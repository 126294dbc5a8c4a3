#include "wsl/report.hpp"

#include <algorithm>
#include <functional>

#include "json.hpp"

namespace wsl::report {

using json = nlohmann::json;

namespace {

bool has_int_sort(const fo::Signature& sig) {
    for (auto s : sig.fields)
        if (s == Sort::Int) return true;
    for (auto& [c, s] : sig.constants)
        if (s == Sort::Int) return true;
    for (auto& [r, ss] : sig.relations)
        for (auto s : ss)
            if (s == Sort::Int) return true;
    return false;
}

std::string strip_suffix(const std::string& r, const std::string& suf) {
    if (r.size() > suf.size() && r.compare(r.size() - suf.size(), suf.size(), suf) == 0)
        return r.substr(0, r.size() - suf.size());
    return "";
}

// Compares predicate interpretations with the least fixpoint of the SID.
// Returns nullopt when the comparison is out of reach.
std::optional<bool> is_lfp(const FOStructure& m, const fo::Signature& sig, const SID& sid) {
    if (has_int_sort(sig) || m.num_locs > 8) return std::nullopt;
    int nil = int(m.consts.at("nil").v);
    auto map = [&](long long l) -> long long {
        if (l == nil) return 0;
        if (l == 0) return nil;
        return l;
    };
    HeapStructure h;
    h.num_locs = m.num_locs;
    h.heap.assign(m.num_locs, {});
    for (int l = 0; l < m.num_locs; ++l) {
        if (map(l) == 0) continue;
        std::vector<Value> rec;
        for (auto& f : m.funcs) rec.push_back(loc(map(f[l].v)));
        h.heap[map(l)] = rec;
    }
    for (auto& [c, v] : m.consts)
        if (c != "nil") h.consts[c] = loc(map(v.v));
    std::map<std::string, std::set<std::pair<std::vector<Value>, Heaplet>>> actual;
    std::set<std::string> preds;
    for (auto& [r, sorts] : sig.relations) {
        auto p = strip_suffix(r, "_fo");
        if (p.empty() || !sid.find(p)) continue;
        preds.insert(p);
        auto eta = m.rels.count(p + "_eta") ? m.rels.at(p + "_eta") : std::set<std::vector<Value>>{};
        for (auto& t : m.rels.count(r) ? m.rels.at(r) : std::set<std::vector<Value>>{}) {
            std::vector<Value> args;
            for (auto& v : t) args.push_back(loc(map(v.v)));
            Heaplet hl = 0;
            for (int x = 0; x < m.num_locs; ++x) {
                auto key = t;
                key.push_back(loc(x));
                if (eta.count(key) && map(x) != 0) hl |= Heaplet(1) << map(x);
            }
            actual[p].insert({args, hl});
        }
    }
    SID sub;
    auto reach = reachable_preds(sid, preds);
    for (auto& d : sid.defs)
        if (reach.count(d.name)) sub.defs.push_back(d);
    if (reach != preds) return std::nullopt;
    auto lfp = lfp_interpret(h, sub);
    for (auto& p : preds)
        if (lfp.preds[p] != actual[p]) return false;
    return true;
}

void finish_finite(Certificate& c, const FOStructure& m, const fo::Signature& sig, const SID* sid) {
    std::optional<bool> lfp;
    if (sid) lfp = is_lfp(m, sig, *sid);
    if (!lfp) {
        c.rogue = false;
        c.rogue_note = "finite model; least-fixpoint comparison not performed";
    } else if (*lfp) {
        c.rogue = false;
        c.rogue_note = "finite model interpreting predicates as the least fixpoint: a standard counter-model";
    } else {
        c.rogue = true;
        c.rogue_note = "finite fixpoint model that is not the least fixpoint";
    }
}

}  // namespace

std::optional<FOStructure> explicate_finite(const sym::SymbolicStructure& s, std::vector<std::string>* names) {
    if (has_int_sort(s.sig)) return std::nullopt;
    std::vector<long long> val;
    for (auto& n : s.nodes) {
        auto v = sym::singleton_value(n.bound);
        if (!v) return std::nullopt;
        val.push_back(*v);
    }
    FOStructure m;
    m.num_locs = int(s.nodes.size());
    for (auto& [c, e] : s.consts) m.consts[c] = loc(e.node);
    for (auto& f : s.funcs) {
        std::vector<Value> col(s.nodes.size());
        for (auto& [n, e] : f) col[n] = loc(e.node);
        m.funcs.push_back(col);
    }
    for (auto& [r, entries] : s.rels) {
        auto& dst = m.rels[r];
        for (auto& [nodes, f] : entries) {
            fo::Subst sub;
            std::vector<Value> t;
            for (size_t j = 0; j < nodes.size(); ++j) {
                sub["i" + std::to_string(j + 1)] = fo::lit(val[nodes[j]]);
                t.push_back(loc(nodes[j]));
            }
            if (sym::decide_lia(fo::subst(f, sub), {})) dst.insert(t);
        }
    }
    if (names) {
        names->clear();
        for (auto& n : s.nodes) names->push_back(n.name);
    }
    return m;
}

Certificate certify(const sym::SymbolicStructure& s, const fo::Obligation& o, const SID* sid,
                    const sym::LiaContext& ctx) {
    auto rep = sym::validate_structure(s, ctx);
    if (!rep.verdict) throw CertificationError("invalid symbolic structure: " + rep.witness, {});
    Certificate c;
    bool ok = true;
    for (auto& a : o.assertions) {
        bool h = sym::model_check(s, a.formula, ctx);
        c.verdicts.push_back({a.tag, a.label, h});
        ok = ok && h;
    }
    if (!ok) throw CertificationError("structure is not a model of the obligation", c.verdicts);
    for (int n = 0; n < int(s.nodes.size()); ++n)
        if (sym::node_is_infinite(s, n, ctx)) c.infinite_nodes.push_back(s.nodes[n].name);
    c.symbolic = s;
    if (!c.infinite_nodes.empty()) {
        c.rogue = true;
        std::string ns;
        for (auto& n : c.infinite_nodes) ns += (ns.empty() ? "" : ", ") + n;
        c.rogue_note = "infinite location domain (nodes: " + ns + ")";
        c.archetype = classify_archetype(s, ctx, &c.boundary);
    } else {
        std::vector<std::string> names;
        auto m = explicate_finite(s, &names);
        if (m)
            finish_finite(c, *m, o.sig, sid);
        else
            c.rogue_note = "finite symbolic model";
    }
    return c;
}

Certificate certify(const FOStructure& m, const std::vector<std::string>& names, const fo::Obligation& o,
                    const SID* sid) {
    if (o.has_theory) throw CertificationError("finite certification requires a theory-free obligation", {});
    Certificate c;
    bool ok = true;
    for (auto& a : o.assertions) {
        bool h = eval_fo(m, {}, a.formula);
        c.verdicts.push_back({a.tag, a.label, h});
        ok = ok && h;
    }
    if (!ok) throw CertificationError("finite structure is not a model of the obligation", c.verdicts);
    c.finite = m;
    c.loc_names = names;
    finish_finite(c, m, o.sig, sid);
    return c;
}

// ---- archetypes -------------------------------------------------------------

int classify_archetype(const sym::SymbolicStructure& s, const sym::LiaContext& ctx, bool* boundary) {
    if (boundary) *boundary = false;
    int nn = int(s.nodes.size());
    std::vector<bool> inf(nn);
    std::vector<int> rays;
    for (int n = 0; n < nn; ++n)
        if (n != s.null_node && sym::node_is_infinite(s, n, ctx)) {
            inf[n] = true;
            rays.push_back(n);
        }
    std::vector<int> loc_fields;
    for (size_t f = 0; f < s.sig.fields.size(); ++f)
        if (s.sig.fields[f] == Sort::Loc) loc_fields.push_back(int(f));
    if (rays.empty() || rays.size() > 2 || loc_fields.empty()) return 0;
    auto succ = [&](int n) {
        std::set<int> out;
        for (int f : loc_fields) {
            auto it = s.funcs[f].find(n);
            if (it != s.funcs[f].end() && it->second.node != sym::kIntNode && it->second.node != s.null_node)
                out.insert(it->second.node);
        }
        return out;
    };
    auto reach = [&](int from) {
        std::set<int> seen;
        std::vector<int> todo{from};
        while (!todo.empty()) {
            int n = todo.back();
            todo.pop_back();
            for (int m : succ(n))
                if (seen.insert(m).second) todo.push_back(m);
        }
        return seen;
    };
    for (int r : rays)
        if (!reach(r).count(r)) return 0;
    bool tree = loc_fields.size() >= 2;
    if (tree) {
        // Some branch of each ray leaves it while another continues it.
        for (int r : rays) {
            bool stays = false, leaves = false;
            for (int f : loc_fields) {
                auto it = s.funcs[f].find(r);
                if (it == s.funcs[f].end()) continue;
                (it->second.node == r ? stays : leaves) = true;
            }
            if (!stays || !leaves) return 0;
        }
    }
    // Singletons unrelated to every ray by reachability.
    std::vector<int> unrelated;
    for (int n = 0; n < nn; ++n) {
        if (n == s.null_node || inf[n]) continue;
        bool related = false;
        auto rn = reach(n);
        for (int r : rays)
            if (rn.count(r) || reach(r).count(n)) related = true;
        if (!related) unrelated.push_back(n);
    }
    std::vector<int> roots;
    for (int u : unrelated) {
        bool reached = false;
        for (int v : unrelated)
            if (v != u && reach(v).count(u)) reached = true;
        if (!reached) roots.push_back(u);
    }
    if (rays.size() == 2) {
        if (reach(rays[0]).count(rays[1]) || reach(rays[1]).count(rays[0])) return 0;
        if (boundary) *boundary = !roots.empty();
        return tree ? 6 : 3;
    }
    if (roots.empty()) return tree ? 4 : 1;
    if (boundary) *boundary = roots.size() > 1;
    return tree ? 5 : 2;
}

const char* archetype_description(int a) {
    switch (a) {
        case 1: return "linked list that never reaches null";
        case 2: return "linked list that never reaches some location other than null";
        case 3: return "two disjoint infinite linked lists that never reach null";
        case 4: return "tree where one path never reaches null";
        case 5: return "tree where one path never reaches some location other than null";
        case 6: return "trees where one path never reaches some location that never reaches null";
    }
    return "unknown";
}

// ---- rendering ----------------------------------------------------------------

namespace {

json finite_json(const FOStructure& m, const std::vector<std::string>& names) {
    auto nm = [&](const Value& v) {
        if (v.sort == Sort::Int) return json(v.v);
        return json(v.v < (long long)names.size() ? names[v.v] : "l" + std::to_string(v.v));
    };
    json j;
    j["locations"] = json::array();
    for (int l = 0; l < m.num_locs; ++l) j["locations"].push_back(nm(loc(l)));
    j["constants"] = json::object();
    for (auto& [c, v] : m.consts) j["constants"][c] = nm(v);
    j["functions"] = json::object();
    for (size_t f = 0; f < m.funcs.size(); ++f) {
        json fj = json::object();
        for (int l = 0; l < m.num_locs; ++l) fj[nm(loc(l)).get<std::string>()] = nm(m.funcs[f][l]);
        j["functions"][fo::field_fn(int(f + 1))] = fj;
    }
    j["relations"] = json::object();
    for (auto& [r, ts] : m.rels) {
        json rj = json::array();
        for (auto& t : ts) {
            json tj = json::array();
            for (auto& v : t) tj.push_back(nm(v));
            rj.push_back(tj);
        }
        j["relations"][r] = rj;
    }
    return j;
}

}  // namespace

std::string render_json(const Certificate& c) {
    json j;
    j["kind"] = c.symbolic ? "symbolic" : "finite";
    j["violated"] = c.violated;
    j["assertions"] = json::array();
    for (auto& v : c.verdicts) j["assertions"].push_back({{"tag", fo::tag_name(v.tag)}, {"label", v.label}, {"holds", v.holds}});
    j["infinite_nodes"] = c.infinite_nodes;
    j["rogue"] = c.rogue;
    j["note"] = c.rogue_note;
    j["archetype"] = c.archetype ? json(c.archetype) : json("unknown");
    j["archetype_boundary"] = c.boundary;
    if (!c.template_name.empty()) j["template"] = c.template_name;
    if (c.symbolic) j["model"] = json::parse(sym::to_json(*c.symbolic));
    if (c.finite) j["model"] = finite_json(*c.finite, c.loc_names);
    return j.dump(2);
}

std::string render_dot(const Certificate& c) {
    if (c.symbolic) {
        std::vector<int> inf;
        for (auto& n : c.infinite_nodes) inf.push_back(sym::node_index(*c.symbolic, n));
        return sym::to_dot(*c.symbolic, inf);
    }
    std::string out = "digraph model {\n  rankdir=LR;\n  node [shape=circle];\n";
    if (!c.finite) return out + "}\n";
    auto& m = *c.finite;
    auto name = [&](long long l) { return l < (long long)c.loc_names.size() ? c.loc_names[l] : "l" + std::to_string(l); };
    std::map<long long, std::string> labels;
    for (auto& [k, v] : m.consts)
        if (v.sort == Sort::Loc) labels[v.v] += (labels[v.v].empty() ? "" : ",") + k;
    for (int l = 0; l < m.num_locs; ++l)
        out += "  n" + std::to_string(l) + " [label=\"" + (labels.count(l) ? labels[l] : name(l)) + "\"];\n";
    long long nil = m.consts.count("nil") ? m.consts.at("nil").v : -1;
    for (size_t f = 0; f < m.funcs.size(); ++f)
        for (int l = 0; l < m.num_locs; ++l) {
            auto& v = m.funcs[f][l];
            if (v.sort != Sort::Loc || l == nil) continue;
            out += "  n" + std::to_string(l) + " -> n" + std::to_string(v.v);
            if (m.funcs.size() > 1) out += " [label=\"" + fo::field_fn(int(f + 1)) + "\"]";
            out += ";\n";
        }
    return out + "}\n";
}

std::string render_text(const Certificate& c) {
    std::string s;
    s += "counter-model (" + std::string(c.symbolic ? "symbolic" : "finite") + ")";
    if (!c.template_name.empty()) s += " from template " + c.template_name;
    s += "\n";
    if (!c.violated.empty()) s += "  entailment: " + c.violated + "\n";
    for (auto& v : c.verdicts)
        s += "  " + std::string(v.holds ? "holds " : "FAILS ") + fo::tag_name(v.tag) + " " + v.label + "\n";
    s += "  " + c.rogue_note + "\n";
    if (c.rogue && c.symbolic) {
        s += "  archetype: " + (c.archetype ? std::to_string(c.archetype) + " (" + archetype_description(c.archetype) + ")"
                                           : std::string("unknown"));
        if (c.boundary) s += " [boundary case]";
        s += "\n";
    }
    return s;
}

}  // namespace wsl::report
