#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wsl/frontend.hpp"
#include "wsl/report.hpp"
#include "wsl/solver.hpp"
#include "wsl/symbolic.hpp"

namespace wsl {

enum class Outcome { Valid, Refuted, Unknown };
const char* outcome_name(Outcome o);
int exit_code(Outcome o);  // 0, 10, 20

// Input outside the supported fragment.
struct DiagnosticError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// Prover and refuter disagree.
struct ConflictError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CheckOptions {
    std::chrono::milliseconds timeout{30000};
    SolverConfig cfg;
    std::vector<sym::Template> templates;  // empty: defaults per signature
    bool prover = true;
    bool refuter = true;
    int prover_nice = 10;  // applied while the refuter runs alongside
};

struct CheckResult {
    Outcome outcome = Outcome::Unknown;
    std::string reason;
    std::string engine;  // "prover" or "refuter"
    std::optional<report::Certificate> certificate;
    size_t splits = 0;
    double seconds = 0;
};

void check_fragment(const Problem& p);  // throws DiagnosticError

// Races the prover against the refuter.
CheckResult run_check(const Problem& p, const CheckOptions& opts);

std::string result_json(const CheckResult& r);
std::string result_text(const CheckResult& r);

struct BenchEntry {
    std::string file, category, expected;
    Outcome outcome = Outcome::Unknown;
    std::string note;
    double seconds = 0;
    bool contradiction = false;
};

struct BenchReport {
    std::vector<BenchEntry> entries;
    std::vector<std::string> categories;  // manifest order
    size_t contradictions() const;
    size_t conclusive() const;
};

// Reads <dir>/manifest.csv (file,category,expected) and checks every entry.
BenchReport run_bench(const std::string& dir, const CheckOptions& per_entry);

std::string bench_table(const BenchReport& r);
std::string bench_csv(const BenchReport& r);

}  // namespace wsl
