#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wsl/encode.hpp"
#include "wsl/foldunfold.hpp"
#include "wsl/normalize.hpp"
#include "wsl/pipeline.hpp"

using namespace wsl;

namespace {

struct Globals {
    double timeout = 30;
    std::string solver_path;
    std::string templates;
    bool json = false;
    std::string emit_smt;
    std::string dot;
};

CheckOptions check_options(const Globals& g) {
    CheckOptions o;
    o.timeout = std::chrono::milliseconds(static_cast<long long>(g.timeout * 1000));
    o.cfg.path = g.solver_path;
    o.cfg.dump_dir = g.emit_smt;
    if (!g.emit_smt.empty()) std::filesystem::create_directories(g.emit_smt);
    if (!g.templates.empty()) o.templates = sym::parse_templates(g.templates);
    return o;
}

void write_dot(const Globals& g, const report::Certificate& c) {
    if (g.dot.empty()) return;
    std::ofstream(g.dot) << report::render_dot(c);
}

int run_mode(const Globals& g, const std::string& file, bool prover, bool refuter) {
    auto p = parse_problem_file(file);
    auto o = check_options(g);
    o.prover = prover;
    o.refuter = refuter;
    auto r = run_check(p, o);
    std::cout << (g.json ? result_json(r) + "\n" : result_text(r));
    if (r.certificate) write_dot(g, *r.certificate);
    return exit_code(r.outcome);
}

int run_fold_unfold(const Globals& g, const std::string& file, int budget) {
    auto p = parse_problem_file(file);
    check_fragment(p);
    auto co = check_options(g);
    FoldUnfoldOptions o;
    o.budget = budget;
    o.timeout = co.timeout;
    o.cfg = co.cfg;
    auto r = fold_unfold(p, o);
    const char* kind = r.kind == FoldUnfoldResult::Proved ? "valid" : r.kind == FoldUnfoldResult::Exhausted ? "exhausted" : "unknown";
    if (g.json) {
        nlohmann::json j;
        j["result"] = kind;
        j["reason"] = r.reason;
        j["axioms_tried"] = r.axioms_tried;
        if (r.kind == FoldUnfoldResult::Proved) j["proof"] = nlohmann::json::parse(proof_to_json(r.proof, p.vocab.record_name));
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << kind;
        if (!r.reason.empty()) std::cout << ": " << r.reason;
        std::cout << "\n";
        if (r.kind == FoldUnfoldResult::Proved) {
            std::cout << "proof uses " << r.proof.axioms.size() << " axiom(s), round " << r.proof.rounds << "\n";
            for (auto& s : r.proof.axioms)
                std::cout << "  " << (s.axiom.kind == FoldUnfoldAxiom::Fold ? "fold   " : "unfold ") << print(s.axiom.sl, p.vocab.record_name)
                          << "\n";
        }
    }
    return r.kind == FoldUnfoldResult::Proved ? 0 : 20;
}

int run_validate(const Globals& g, const std::string& model, const std::string& file) {
    auto s = sym::load_structure(model);
    auto p = parse_problem_file(file);
    check_fragment(p);
    auto co = check_options(g);
    sym::LiaContext ctx{co.cfg, co.timeout, nullptr};
    auto rep = sym::validate_structure(s, ctx);
    if (!rep.verdict) {
        std::cerr << "error: invalid structure: " << rep.witness << "\n";
        return 2;
    }
    auto sk = skolemize(p.antecedents);
    auto splits = split_entailment(sk, p.consequent);
    std::string last;
    for (auto& e : splits) {
        auto o = encode_entailment(e, p.sid, p.vocab);
        try {
            auto c = report::certify(s, o, &p.sid, ctx);
            std::cout << (g.json ? report::render_json(c) + "\n" : "certified\n" + report::render_text(c));
            write_dot(g, c);
            return 10;
        } catch (const report::CertificationError& ex) {
            last = ex.what();
            for (auto& v : ex.verdicts)
                if (!v.holds) last += "; fails " + std::string(fo::tag_name(v.tag)) + " " + v.label;
        }
    }
    std::cout << "not certified: " << last << "\n";
    return 20;
}

int run_bench_cmd(const Globals& g, const std::string& dir, const std::string& csv) {
    auto r = run_bench(dir, check_options(g));
    bool csv_stdout = csv == "-";
    if (!csv.empty() && !csv_stdout) std::ofstream(csv) << bench_csv(r);
    if (g.json) {
        nlohmann::json j = nlohmann::json::array();
        for (auto& e : r.entries)
            j.push_back({{"file", e.file}, {"category", e.category}, {"expected", e.expected},
                         {"result", outcome_name(e.outcome)}, {"seconds", e.seconds}, {"note", e.note},
                         {"contradiction", e.contradiction}});
        std::cout << j.dump(2) << "\n";
    } else if (csv_stdout) {
        std::cout << bench_csv(r);
    } else {
        for (auto& e : r.entries) {
            char buf[256];
            std::snprintf(buf, sizeof buf, "%-36s %-10s %-8s %7.2fs%s\n", e.file.c_str(), e.expected.c_str(),
                          outcome_name(e.outcome), e.seconds, e.contradiction ? "  CONTRADICTION" : "");
            std::cout << buf;
        }
        std::cout << "\n" << bench_table(r);
    }
    return r.contradictions() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entailment checker for separation logic with inductive definitions"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--timeout", g.timeout, "Global timeout in seconds")->default_val(30)->check(CLI::PositiveNumber);
    app.add_option("--solver-path", g.solver_path, "SMT solver executable");
    app.add_option("--template", g.templates, "Counter-model templates, e.g. list:1,tree:0");
    app.add_flag("--json", g.json, "Machine-readable output");
    app.add_option("--emit-smt", g.emit_smt, "Write every solver query to this directory");
    app.add_option("--dot", g.dot, "Write the counter-model as Graphviz to this file");

    std::string file, model, dir;
    int budget = 3;
    std::string csv;
    auto* check = app.add_subcommand("check", "Decide an entailment");
    check->add_option("file", file)->required();
    auto* prove = app.add_subcommand("prove-wsl", "Run the prover only");
    prove->add_option("file", file)->required();
    auto* refute = app.add_subcommand("refute", "Run the counter-model search only");
    refute->add_option("file", file)->required();
    auto* fu = app.add_subcommand("fold-unfold", "Search for a fold/unfold proof");
    fu->add_option("file", file)->required();
    fu->add_option("--budget", budget, "Rounds")->default_val(3)->check(CLI::NonNegativeNumber);
    auto* val = app.add_subcommand("validate-model", "Certify a symbolic structure against a problem");
    val->add_option("model", model)->required();
    val->add_option("file", file)->required();
    auto* bench = app.add_subcommand("bench", "Run a corpus with a manifest");
    bench->add_option("dir", dir)->required();
    bench->add_option("--csv", csv, "Write the summary as CSV to this file (- for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*check) return run_mode(g, file, true, true);
        if (*prove) return run_mode(g, file, true, false);
        if (*refute) return run_mode(g, file, false, true);
        if (*fu) return run_fold_unfold(g, file, budget);
        if (*val) return run_validate(g, model, file);
        if (*bench) return run_bench_cmd(g, dir, csv);
    } catch (const ParseError& e) {
        std::cerr << file << ":" << e.line << ":" << e.col << ": error: " << e.what() << "\n";
        return 2;
    } catch (const ConflictError& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
