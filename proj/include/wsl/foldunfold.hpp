#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "wsl/encode.hpp"
#include "wsl/frontend.hpp"
#include "wsl/solver.hpp"

namespace wsl {

struct ProofStep {
    size_t split = 0;  // index of the split entailment
    FoldUnfoldAxiom axiom;
};

struct ProofObject {
    size_t splits = 0;
    int rounds = 0;  // highest round used
    std::vector<ProofStep> axioms;
};

struct FoldUnfoldOptions {
    int budget = 3;  // rounds
    std::chrono::milliseconds timeout{30000};
    SolverConfig cfg;
    const CancelFlag* cancel = nullptr;
    size_t max_axioms = 20000;
    bool minimize = true;
};

struct FoldUnfoldResult {
    enum Kind { Proved, Exhausted, Unknown } kind = Unknown;
    ProofObject proof;  // Proved
    std::string reason;
    size_t axioms_tried = 0;
};

// Searches for a set of fold/unfold instances under which the entailment,
// with predicates uninterpreted, is FO-valid.
FoldUnfoldResult fold_unfold(const Problem& p, const FoldUnfoldOptions& opts);

std::string proof_to_json(const ProofObject& p, const std::string& record = "node");

}  // namespace wsl
