#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "wsl/finite.hpp"
#include "wsl/fo.hpp"
#include "wsl/sexpr.hpp"

namespace wsl {

struct SolverConfig {
    std::string path;      // empty: $WSL_SOLVER, then "z3"
    std::string dump_dir;  // write every query here when non-empty
    int nice = 0;          // scheduling priority offset of the solver process
    std::string resolved_path() const;
};

struct SpawnError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SolverOutputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using CancelFlag = std::atomic<bool>;

struct ProcessResult {
    enum Status { Exited, TimedOut, Cancelled } status;
    std::string out;
    int exit_code = 0;
};

// Runs the solver on `script` with a hard deadline; the process is killed on
// timeout or cancellation.
ProcessResult run_solver(const SolverConfig& cfg, const std::string& script, std::chrono::milliseconds timeout,
                         const CancelFlag* cancel = nullptr);

struct SolverVerdict {
    enum Kind { Unsat, Sat, Unknown } kind = Unknown;
    std::string reason;  // Unknown: "timeout", "cancelled", "incomplete"
    std::string transcript;
    std::optional<FOStructure> model;  // Sat on theory-free obligations
    std::vector<std::string> loc_names;
    std::optional<std::vector<size_t>> core;  // assertion indices, when requested
};

const char* verdict_name(SolverVerdict::Kind k);

struct EmitOptions {
    bool get_model = false;
    bool unsat_core = false;
};

std::string smt_symbol(const std::string& name);
std::string emit_smtlib(const fo::Obligation& o, const EmitOptions& opts = {});

SolverVerdict check(const fo::Obligation& o, std::chrono::milliseconds timeout, const SolverConfig& cfg = {},
                    const CancelFlag* cancel = nullptr, bool want_model = false, bool want_core = false);

// Runs an arbitrary script whose first answer is a check-sat result.
SolverVerdict check_script(const std::string& script, std::chrono::milliseconds timeout, const SolverConfig& cfg,
                           const CancelFlag* cancel = nullptr);

// Extracts a finite structure from a z3 model for a signature without ints.
FOStructure parse_model(const std::string& model_text, const fo::Signature& sig, std::vector<std::string>* names);

// Parses a ((name value) ...) answer to get-value.
std::map<std::string, long long> parse_int_values(const std::string& text);

}  // namespace wsl
