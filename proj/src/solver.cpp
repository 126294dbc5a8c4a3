#include "wsl/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>

extern char** environ;

namespace wsl {

std::string SolverConfig::resolved_path() const {
    if (!path.empty()) return path;
    if (const char* env = std::getenv("WSL_SOLVER"); env && *env) return env;
    return "z3";
}

const char* verdict_name(SolverVerdict::Kind k) {
    switch (k) {
        case SolverVerdict::Unsat: return "unsat";
        case SolverVerdict::Sat: return "sat";
        case SolverVerdict::Unknown: return "unknown";
    }
    return "?";
}

ProcessResult run_solver(const SolverConfig& cfg, const std::string& script, std::chrono::milliseconds timeout,
                         const CancelFlag* cancel) {
    static std::once_flag sigpipe_once;
    std::call_once(sigpipe_once, [] { signal(SIGPIPE, SIG_IGN); });

    if (!cfg.dump_dir.empty()) {
        static std::atomic<int> counter{0};
        std::filesystem::create_directories(cfg.dump_dir);
        std::ofstream(cfg.dump_dir + "/query_" + std::to_string(counter++) + ".smt2") << script;
    }

    int in[2], out[2];
    if (pipe2(in, O_CLOEXEC) != 0) throw SpawnError(std::string("pipe: ") + std::strerror(errno));
    if (pipe2(out, O_CLOEXEC) != 0) {
        close(in[0]);
        close(in[1]);
        throw SpawnError(std::string("pipe: ") + std::strerror(errno));
    }
    posix_spawn_file_actions_t fa;
    posix_spawn_file_actions_init(&fa);
    posix_spawn_file_actions_adddup2(&fa, in[0], 0);
    posix_spawn_file_actions_adddup2(&fa, out[1], 1);
    posix_spawn_file_actions_addopen(&fa, 2, "/dev/null", O_WRONLY, 0);
    std::string path = cfg.resolved_path();
    std::string a1 = "-in", a2 = "-smt2";
    char* argv[] = {path.data(), a1.data(), a2.data(), nullptr};
    pid_t pid;
    int rc = posix_spawnp(&pid, path.c_str(), &fa, nullptr, argv, environ);
    posix_spawn_file_actions_destroy(&fa);
    if (rc == 0 && cfg.nice > 0) setpriority(PRIO_PROCESS, pid, cfg.nice);
    close(in[0]);
    close(out[1]);
    if (rc != 0) {
        close(in[1]);
        close(out[0]);
        throw SpawnError("cannot start solver '" + path + "': " + std::strerror(rc));
    }
    fcntl(in[1], F_SETFL, O_NONBLOCK);
    fcntl(out[0], F_SETFL, O_NONBLOCK);

    ProcessResult res{ProcessResult::Exited, "", 0};
    auto deadline = std::chrono::steady_clock::now() + timeout;
    size_t written = 0;
    int wfd = in[1];
    bool eof = false;
    char buf[65536];
    while (!eof) {
        if (cancel && cancel->load()) {
            res.status = ProcessResult::Cancelled;
            break;
        }
        auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            res.status = ProcessResult::TimedOut;
            break;
        }
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
        pollfd fds[2];
        int n = 0;
        fds[n++] = {out[0], POLLIN, 0};
        if (wfd >= 0) fds[n++] = {wfd, POLLOUT, 0};
        int pr = poll(fds, n, int(std::min<long long>(left, 50)));
        if (pr < 0 && errno != EINTR) break;
        if (pr <= 0) continue;
        if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
            ssize_t r = read(out[0], buf, sizeof buf);
            if (r > 0)
                res.out.append(buf, size_t(r));
            else if (r == 0)
                eof = true;
        }
        if (wfd >= 0 && n > 1 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
            ssize_t w = write(wfd, script.data() + written, script.size() - written);
            if (w > 0) written += size_t(w);
            if (w < 0 && errno != EAGAIN) written = script.size();
            if (written >= script.size()) {
                close(wfd);
                wfd = -1;
            }
        }
    }
    if (wfd >= 0) close(wfd);
    close(out[0]);
    if (res.status != ProcessResult::Exited) {
        kill(pid, SIGKILL);
    }
    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    if (res.status == ProcessResult::Exited) res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string smt_symbol(const std::string& name) {
    if (!name.empty() && (name[0] == '_' || name.find_first_of("'#| ") != std::string::npos)) return "|" + name + "|";
    return name;
}

static const char* smt_sort(Sort s) { return s == Sort::Loc ? "Loc" : "Int"; }

std::string emit_smtlib(const fo::Obligation& o, const EmitOptions& opts) {
    std::string s;
    if (opts.get_model) s += "(set-option :produce-models true)\n";
    if (opts.unsat_core) s += "(set-option :produce-unsat-cores true)\n";
    s += "(declare-sort Loc 0)\n";
    s += "(declare-fun nil () Loc)\n";
    for (size_t i = 0; i < o.sig.fields.size(); ++i)
        s += "(declare-fun " + fo::field_fn(int(i + 1)) + " (Loc) " + smt_sort(o.sig.fields[i]) + ")\n";
    for (auto& [c, so] : o.sig.constants)
        if (c != "nil") s += "(declare-fun " + smt_symbol(c) + " () " + smt_sort(so) + ")\n";
    for (auto& [r, ps] : o.sig.relations) {
        s += "(declare-fun " + r + " (";
        for (size_t i = 0; i < ps.size(); ++i) s += (i ? " " : "") + std::string(smt_sort(ps[i]));
        s += ") Bool)\n";
    }
    for (size_t i = 0; i < o.assertions.size(); ++i) {
        auto& a = o.assertions[i];
        s += "; " + std::string(fo::tag_name(a.tag)) + " " + a.label + "\n";
        if (opts.unsat_core)
            s += "(assert (! " + fo::to_string(a.formula) + " :named a" + std::to_string(i) + "))\n";
        else
            s += "(assert " + fo::to_string(a.formula) + ")\n";
    }
    s += "(check-sat)\n";
    if (opts.get_model) s += "(get-model)\n";
    if (opts.unsat_core) s += "(get-unsat-core)\n";
    return s;
}

SolverVerdict check_script(const std::string& script, std::chrono::milliseconds timeout, const SolverConfig& cfg,
                           const CancelFlag* cancel) {
    SolverVerdict v;
    if (timeout.count() <= 0) {
        v.reason = "timeout";
        return v;
    }
    auto r = run_solver(cfg, script, timeout, cancel);
    if (r.status == ProcessResult::TimedOut) {
        v.reason = "timeout";
        return v;
    }
    if (r.status == ProcessResult::Cancelled) {
        v.reason = "cancelled";
        return v;
    }
    v.transcript = r.out;
    std::vector<SExpr> items;
    try {
        items = parse_sexprs(r.out);
    } catch (const SExprError& e) {
        throw SolverOutputError(std::string("malformed solver output: ") + e.what());
    }
    for (auto& it : items) {
        if (it.is("sat")) {
            v.kind = SolverVerdict::Sat;
            return v;
        }
        if (it.is("unsat")) {
            v.kind = SolverVerdict::Unsat;
            return v;
        }
        if (it.is("unknown") || it.is("timeout")) {
            v.reason = "incomplete";
            return v;
        }
        if (it.is_list && it.size() >= 1 && it[0].is("error"))
            throw SolverOutputError("solver error: " + (it.size() > 1 ? it[1].atom : std::string("?")));
    }
    throw SolverOutputError("solver produced no verdict" + (r.out.empty() ? std::string("") : ": " + r.out.substr(0, 200)));
}

SolverVerdict check(const fo::Obligation& o, std::chrono::milliseconds timeout, const SolverConfig& cfg,
                    const CancelFlag* cancel, bool want_model, bool want_core) {
    bool model = want_model && !o.has_theory;
    auto v = check_script(emit_smtlib(o, {model, want_core}), timeout, cfg, cancel);
    if (v.kind == SolverVerdict::Unsat && want_core) {
        auto items = parse_sexprs(v.transcript);
        for (size_t i = 0; i + 1 < items.size(); ++i)
            if (items[i].is("unsat")) {
                v.core.emplace();
                for (auto& n : items[i + 1].items)
                    if (!n.is_list && n.atom.size() > 1 && n.atom[0] == 'a')
                        v.core->push_back(std::stoul(n.atom.substr(1)));
                std::sort(v.core->begin(), v.core->end());
                break;
            }
    }
    if (v.kind == SolverVerdict::Sat && model) {
        auto items = parse_sexprs(v.transcript);
        for (size_t i = 0; i + 1 < items.size(); ++i)
            if (items[i].is("sat")) {
                v.model = parse_model(items[i + 1].str(), o.sig, &v.loc_names);
                break;
            }
    }
    return v;
}

// ---- model evaluation -------------------------------------------------------

namespace {

struct EV {
    enum K { B, I, L } k;
    long long v;
    bool operator==(const EV& o) const { return k == o.k && v == o.v; }
};

struct ModelEval {
    struct Def {
        std::vector<std::string> params;
        SExpr body;
    };
    std::map<std::string, Def> defs;
    std::map<std::string, long long> universe;
    std::map<std::string, EV::K> result_sort;

    EV eval(const SExpr& e, std::map<std::string, EV>& env, int depth = 0) {
        if (depth > 10000) throw SolverOutputError("model evaluation too deep");
        if (!e.is_list) {
            auto& a = e.atom;
            if (a == "true") return {EV::B, 1};
            if (a == "false") return {EV::B, 0};
            if (!a.empty() && (std::isdigit(static_cast<unsigned char>(a[0])))) return {EV::I, std::stoll(a)};
            if (auto it = env.find(a); it != env.end()) return it->second;
            if (auto it = universe.find(a); it != universe.end()) return {EV::L, it->second};
            return apply(a, {}, env, depth);
        }
        if (e.items.empty()) throw SolverOutputError("empty application in model");
        auto& h = e[0];
        if (h.is_list) throw SolverOutputError("unsupported model term " + e.str());
        auto& op = h.atom;
        auto arg = [&](size_t i) { return eval(e[i], env, depth + 1); };
        if (op == "ite") return arg(1).v ? arg(2) : arg(3);
        if (op == "not") return {EV::B, !arg(1).v};
        if (op == "and") {
            for (size_t i = 1; i < e.size(); ++i)
                if (!arg(i).v) return {EV::B, 0};
            return {EV::B, 1};
        }
        if (op == "or") {
            for (size_t i = 1; i < e.size(); ++i)
                if (arg(i).v) return {EV::B, 1};
            return {EV::B, 0};
        }
        if (op == "=>") return {EV::B, !arg(1).v || arg(2).v};
        if (op == "=") {
            auto a = arg(1);
            for (size_t i = 2; i < e.size(); ++i)
                if (!(arg(i) == a)) return {EV::B, 0};
            return {EV::B, 1};
        }
        if (op == "distinct") {
            std::vector<EV> vs;
            for (size_t i = 1; i < e.size(); ++i) vs.push_back(arg(i));
            for (size_t i = 0; i < vs.size(); ++i)
                for (size_t j = i + 1; j < vs.size(); ++j)
                    if (vs[i] == vs[j]) return {EV::B, 0};
            return {EV::B, 1};
        }
        if (op == "+") {
            long long s = 0;
            for (size_t i = 1; i < e.size(); ++i) s += arg(i).v;
            return {EV::I, s};
        }
        if (op == "-") {
            if (e.size() == 2) return {EV::I, -arg(1).v};
            long long s = arg(1).v;
            for (size_t i = 2; i < e.size(); ++i) s -= arg(i).v;
            return {EV::I, s};
        }
        if (op == "*") {
            long long s = 1;
            for (size_t i = 1; i < e.size(); ++i) s *= arg(i).v;
            return {EV::I, s};
        }
        if (op == "<") return {EV::B, arg(1).v < arg(2).v};
        if (op == "<=") return {EV::B, arg(1).v <= arg(2).v};
        if (op == ">") return {EV::B, arg(1).v > arg(2).v};
        if (op == ">=") return {EV::B, arg(1).v >= arg(2).v};
        if (op == "let") {
            auto saved = env;
            std::vector<std::pair<std::string, EV>> binds;
            for (auto& b : e[1].items) binds.push_back({b[0].atom, eval(b[1], env, depth + 1)});
            for (auto& [n, v] : binds) env[n] = v;
            auto r = eval(e[2], env, depth + 1);
            env = saved;
            return r;
        }
        std::vector<EV> args;
        for (size_t i = 1; i < e.size(); ++i) args.push_back(arg(i));
        return apply(op, args, env, depth);
    }

    EV apply(const std::string& f, const std::vector<EV>& args, std::map<std::string, EV>&, int depth) {
        auto it = defs.find(f);
        if (it == defs.end()) {
            auto rs = result_sort.find(f);
            if (rs == result_sort.end()) throw SolverOutputError("unknown symbol in model: " + f);
            // Symbols absent from the model are unconstrained.
            return {rs->second, 0};
        }
        if (it->second.params.size() != args.size()) throw SolverOutputError("arity mismatch in model for " + f);
        std::map<std::string, EV> local;
        for (size_t i = 0; i < args.size(); ++i) local[it->second.params[i]] = args[i];
        return eval(it->second.body, local, depth + 1);
    }
};

}  // namespace

FOStructure parse_model(const std::string& model_text, const fo::Signature& sig, std::vector<std::string>* names) {
    SExpr m;
    try {
        m = parse_sexpr(model_text);
    } catch (const SExprError& e) {
        throw SolverOutputError(std::string("malformed model: ") + e.what());
    }
    ModelEval ev;
    std::vector<std::string> locs;
    auto items = m.items;
    if (!items.empty() && items[0].is("model")) items.erase(items.begin());
    for (auto& d : items) {
        if (!d.is_list || d.size() < 3) continue;
        if (d[0].is("declare-fun") && d.size() == 4 && d[3].is("Loc") && d[2].is_list && d[2].size() == 0) {
            ev.universe[d[1].atom] = (long long)locs.size();
            locs.push_back(d[1].atom);
        } else if (d[0].is("define-fun") && d.size() == 5) {
            ModelEval::Def def;
            for (auto& p : d[2].items) def.params.push_back(p[0].atom);
            def.body = d[4];
            ev.defs[d[1].atom] = def;
        }
    }
    if (locs.empty()) {
        // A one-element Loc domain may come without an explicit universe.
        ev.universe["Loc!val!0"] = 0;
        locs.push_back("Loc!val!0");
    }
    auto ksort = [](Sort s) { return s == Sort::Loc ? EV::L : EV::I; };
    for (auto& [c, s] : sig.constants) ev.result_sort[c] = ksort(s);
    for (size_t i = 0; i < sig.fields.size(); ++i) ev.result_sort[fo::field_fn(int(i + 1))] = ksort(sig.fields[i]);
    for (auto& [r, ps] : sig.relations) ev.result_sort[r] = EV::B;

    FOStructure out;
    out.num_locs = int(locs.size());
    std::map<std::string, EV> env;
    auto to_value = [](EV e) { return e.k == EV::L ? loc(e.v) : ival(e.v); };
    for (auto& [c, s] : sig.constants) out.consts[c] = to_value(ev.apply(c, {}, env, 0));
    for (size_t i = 0; i < sig.fields.size(); ++i) {
        std::vector<Value> f;
        for (int l = 0; l < out.num_locs; ++l) f.push_back(to_value(ev.apply(fo::field_fn(int(i + 1)), {{EV::L, l}}, env, 0)));
        out.funcs.push_back(f);
    }
    for (auto& [r, ps] : sig.relations) {
        for (auto s : ps)
            if (s != Sort::Loc) throw SolverOutputError("cannot enumerate relation " + r + " over int");
        auto& dst = out.rels[r];
        std::vector<int> idx(ps.size(), 0);
        while (true) {
            std::vector<EV> args;
            std::vector<Value> tup;
            for (auto i : idx) {
                args.push_back({EV::L, i});
                tup.push_back(loc(i));
            }
            if (ev.apply(r, args, env, 0).v) dst.insert(tup);
            size_t k = 0;
            while (k < idx.size() && ++idx[k] == out.num_locs) idx[k++] = 0;
            if (k == idx.size()) break;
        }
    }
    if (names) *names = locs;
    return out;
}

std::map<std::string, long long> parse_int_values(const std::string& text) {
    std::map<std::string, long long> out;
    auto e = parse_sexpr(text);
    for (auto& p : e.items) {
        if (!p.is_list || p.size() != 2) throw SolverOutputError("bad get-value answer");
        auto& v = p[1];
        long long x;
        if (!v.is_list)
            x = std::stoll(v.atom);
        else if (v.size() == 2 && v[0].is("-"))
            x = -std::stoll(v[1].atom);
        else
            throw SolverOutputError("non-literal value in get-value answer: " + v.str());
        out[p[0].str()] = x;
    }
    return out;
}

}  // namespace wsl
