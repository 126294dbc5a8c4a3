#include "wsl/pipeline.hpp"

#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "wsl/encode.hpp"
#include "wsl/normalize.hpp"

namespace wsl {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using std::chrono::milliseconds;

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Valid: return "valid";
        case Outcome::Refuted: return "refuted";
        case Outcome::Unknown: return "unknown";
    }
    return "?";
}

int exit_code(Outcome o) {
    switch (o) {
        case Outcome::Valid: return 0;
        case Outcome::Refuted: return 10;
        case Outcome::Unknown: return 20;
    }
    return 2;
}

void check_fragment(const Problem& p) {
    auto s = check_sid(p.sid);
    if (!s.verdict) throw DiagnosticError("SID outside the supported fragment (" + s.category + "): " + s.witness);
    for (auto& a : p.antecedents) {
        auto r = check_edh(a);
        if (!r.verdict) throw DiagnosticError("antecedent outside " + r.category + ": " + r.witness);
    }
    auto r = check_edh(p.consequent);
    if (!r.verdict) throw DiagnosticError("consequent outside " + r.category + ": " + r.witness);
}

namespace {

struct Prepared {
    std::vector<NormalizedEntailment> splits;
    std::vector<fo::Obligation> obligations;
};

Prepared prepare(const Problem& p) {
    check_fragment(p);
    Prepared out;
    auto sk = skolemize(p.antecedents);
    try {
        out.splits = split_entailment(sk, p.consequent);
    } catch (const SplitLimitError& e) {
        throw DiagnosticError(e.what());
    }
    for (auto& s : out.splits) out.obligations.push_back(encode_entailment(s, p.sid, p.vocab));
    return out;
}

struct EngineResult {
    Outcome outcome = Outcome::Unknown;
    std::string reason;
    std::optional<report::Certificate> cert;
    std::exception_ptr error;
    bool done = false;
};

std::string describe_split(const NormalizedEntailment& e, const std::string& rec) {
    std::string s = print(e.antecedent, rec) + " |- ";
    std::vector<FormulaP> ds = e.consequent_disjuncts;
    FormulaP q = ds.size() == 1 ? ds[0] : mk_or(ds);
    if (!e.consequent_exists.empty()) q = mk_exists(e.consequent_exists, q);
    return s + print(q, rec);
}

EngineResult prove(const Problem& p, const Prepared& pr, Clock::time_point deadline, const SolverConfig& cfg,
                   const CancelFlag* cancel) {
    EngineResult r;
    r.outcome = Outcome::Valid;
    for (size_t i = 0; i < pr.obligations.size(); ++i) {
        auto& o = pr.obligations[i];
        auto left = std::chrono::duration_cast<milliseconds>(deadline - Clock::now());
        auto v = check(o, left, cfg, cancel, true);
        if (v.kind == SolverVerdict::Unsat) continue;
        if (v.kind == SolverVerdict::Sat && v.model) {
            try {
                auto c = report::certify(*v.model, v.loc_names, o, &p.sid);
                c.violated = describe_split(pr.splits[i], p.vocab.record_name);
                r.outcome = Outcome::Refuted;
                r.cert = std::move(c);
                return r;
            } catch (const report::CertificationError& e) {
                r.outcome = Outcome::Unknown;
                r.reason = std::string("solver model failed certification: ") + e.what();
                return r;
            }
        }
        r.outcome = Outcome::Unknown;
        r.reason = v.kind == SolverVerdict::Sat ? "satisfiable obligation without a finite model" : v.reason;
        return r;
    }
    return r;
}

EngineResult refute(const Problem& p, const Prepared& pr, Clock::time_point deadline, const CheckOptions& opts,
                    const CancelFlag* cancel) {
    EngineResult r;
    for (size_t i = 0; i < pr.obligations.size(); ++i) {
        auto& o = pr.obligations[i];
        auto tpls = opts.templates.empty() ? sym::default_templates(o.sig) : opts.templates;
        sym::FindOptions fo;
        fo.timeout = std::chrono::duration_cast<milliseconds>(deadline - Clock::now());
        if (fo.timeout.count() <= 0) break;
        fo.cfg = opts.cfg;
        fo.cancel = cancel;
        sym::FindResult f;
        try {
            f = sym::find_model(o, tpls, fo);
        } catch (const sym::LiaError&) {
            if (cancel && cancel->load()) break;
            throw;
        }
        if (!f.model) continue;
        sym::LiaContext ctx{opts.cfg, std::max(milliseconds(20000), fo.timeout), cancel};
        try {
            auto c = report::certify(*f.model, o, &p.sid, ctx);
            c.violated = describe_split(pr.splits[i], p.vocab.record_name);
            c.template_name = f.template_name;
            r.outcome = Outcome::Refuted;
            r.cert = std::move(c);
            return r;
        } catch (const sym::LiaError&) {
            if (cancel && cancel->load()) break;
            throw;
        }
    }
    r.reason = cancel && cancel->load() ? "cancelled" : "no counter-model found";
    return r;
}

}  // namespace

CheckResult run_check(const Problem& p, const CheckOptions& opts) {
    auto t0 = Clock::now();
    auto deadline = t0 + opts.timeout;
    auto pr = prepare(p);
    CheckResult out;
    out.splits = pr.splits.size();

    CancelFlag cancel{false};
    std::mutex mu;
    std::condition_variable cv;
    EngineResult pres, rres;
    auto launch = [&](EngineResult& slot, auto body) {
        return std::thread([&, body] {
            EngineResult r;
            try {
                r = body();
            } catch (...) {
                r.error = std::current_exception();
            }
            std::lock_guard lk(mu);
            r.done = true;
            slot = std::move(r);
            if (slot.outcome != Outcome::Unknown || slot.error) cancel = true;
            cv.notify_all();
        });
    };
    std::vector<std::thread> ts;
    SolverConfig prover_cfg = opts.cfg;
    if (opts.refuter) prover_cfg.nice = opts.prover_nice;
    if (opts.prover) ts.push_back(launch(pres, [&] { return prove(p, pr, deadline, prover_cfg, &cancel); }));
    else pres.done = true;
    if (opts.refuter) ts.push_back(launch(rres, [&] { return refute(p, pr, deadline, opts, &cancel); }));
    else rres.done = true;
    for (auto& t : ts) t.join();

    if (pres.error) std::rethrow_exception(pres.error);
    if (rres.error) std::rethrow_exception(rres.error);
    auto conclusive = [](const EngineResult& r) { return r.outcome != Outcome::Unknown; };
    if (conclusive(pres) && conclusive(rres) && pres.outcome != rres.outcome)
        throw ConflictError("prover reports valid but the refuter certified a counter-model");
    const EngineResult* win = nullptr;
    if (conclusive(pres)) win = &pres;
    else if (conclusive(rres)) win = &rres;
    if (win) {
        out.outcome = win->outcome;
        out.engine = win == &pres ? "prover" : "refuter";
        out.certificate = win->cert;
        if (out.outcome == Outcome::Refuted && !out.certificate)
            throw std::logic_error("refuted outcome without certificate");
    } else {
        out.outcome = Outcome::Unknown;
        std::string why;
        if (opts.prover) why += "prover: " + (pres.reason.empty() ? std::string("timeout") : pres.reason);
        if (opts.refuter) why += std::string(why.empty() ? "" : "; ") + "refuter: " + rres.reason;
        if (Clock::now() >= deadline) why = "timeout; " + why;
        out.reason = why;
    }
    out.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return out;
}

std::string result_json(const CheckResult& r) {
    nlohmann::json j;
    j["result"] = outcome_name(r.outcome);
    j["engine"] = r.engine;
    j["reason"] = r.reason;
    j["splits"] = r.splits;
    j["seconds"] = r.seconds;
    if (r.certificate) j["certificate"] = nlohmann::json::parse(report::render_json(*r.certificate));
    return j.dump(2);
}

std::string result_text(const CheckResult& r) {
    std::ostringstream s;
    s << outcome_name(r.outcome);
    if (!r.engine.empty()) s << " (" << r.engine << ")";
    if (!r.reason.empty()) s << ": " << r.reason;
    s << "\n";
    if (r.certificate) s << report::render_text(*r.certificate);
    return s.str();
}

// ---- bench ---------------------------------------------------------------------

size_t BenchReport::contradictions() const {
    size_t n = 0;
    for (auto& e : entries) n += e.contradiction;
    return n;
}

size_t BenchReport::conclusive() const {
    size_t n = 0;
    for (auto& e : entries) n += e.outcome != Outcome::Unknown;
    return n;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.back()))) cell.pop_back();
        size_t b = 0;
        while (b < cell.size() && std::isspace(static_cast<unsigned char>(cell[b]))) ++b;
        out.push_back(cell.substr(b));
    }
    return out;
}

}  // namespace

BenchReport run_bench(const std::string& dir, const CheckOptions& per_entry) {
    std::ifstream in(fs::path(dir) / "manifest.csv");
    if (!in) throw DiagnosticError("cannot read " + (fs::path(dir) / "manifest.csv").string());
    BenchReport rep;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto cells = split_csv(line);
        if (header) {
            header = false;
            if (!cells.empty() && cells[0] == "file") continue;
        }
        if (cells.size() < 3) throw DiagnosticError("malformed manifest line: " + line);
        BenchEntry e;
        e.file = cells[0];
        e.category = cells[1];
        e.expected = cells[2];
        if (std::find(rep.categories.begin(), rep.categories.end(), e.category) == rep.categories.end())
            rep.categories.push_back(e.category);
        auto t0 = Clock::now();
        try {
            auto p = parse_problem_file((fs::path(dir) / e.file).string());
            auto r = run_check(p, per_entry);
            e.outcome = r.outcome;
            e.note = r.reason;
        } catch (const std::exception& ex) {
            e.outcome = Outcome::Unknown;
            e.note = std::string("error: ") + ex.what();
        }
        e.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        e.contradiction = (e.expected == "valid" && e.outcome == Outcome::Refuted) ||
                          (e.expected == "invalid" && e.outcome == Outcome::Valid);
        rep.entries.push_back(e);
    }
    return rep;
}

namespace {

struct Row {
    std::string category;
    size_t examples = 0, valid = 0, counter = 0, timeout = 0;
};

std::vector<Row> tabulate(const BenchReport& r) {
    std::vector<Row> rows;
    Row total{"total"};
    for (auto& c : r.categories) {
        Row row{c};
        for (auto& e : r.entries) {
            if (e.category != c) continue;
            ++row.examples;
            row.valid += e.outcome == Outcome::Valid;
            row.counter += e.outcome == Outcome::Refuted;
            row.timeout += e.outcome == Outcome::Unknown;
        }
        total.examples += row.examples;
        total.valid += row.valid;
        total.counter += row.counter;
        total.timeout += row.timeout;
        rows.push_back(row);
    }
    rows.push_back(total);
    return rows;
}

}  // namespace

std::string bench_table(const BenchReport& r) {
    std::ostringstream s;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-20s %12s %9s %17s %11s\n", "Category", "# Examples", "# Valid", "# Counter-model",
                  "# Timeout");
    s << buf;
    for (auto& row : tabulate(r)) {
        std::snprintf(buf, sizeof buf, "%-20s %12zu %9zu %17zu %11zu\n", row.category.c_str(), row.examples,
                      row.valid, row.counter, row.timeout);
        s << buf;
    }
    s << "contradictions: " << r.contradictions() << "\n";
    return s.str();
}

std::string bench_csv(const BenchReport& r) {
    std::ostringstream s;
    s << "category,# Examples,# Valid,# Counter-model,# Timeout\n";
    for (auto& row : tabulate(r))
        s << row.category << "," << row.examples << "," << row.valid << "," << row.counter << "," << row.timeout
          << "\n";
    return s.str();
}

}  // namespace wsl
