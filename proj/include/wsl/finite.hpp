#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "wsl/fo.hpp"
#include "wsl/sl.hpp"

namespace wsl {

struct Value {
    Sort sort = Sort::Loc;
    long long v = 0;
    auto operator<=>(const Value&) const = default;
};

inline Value loc(long long l) { return {Sort::Loc, l}; }
inline Value ival(long long i) { return {Sort::Int, i}; }

// Bit k set means location k is in the heaplet; location 0 is null.
using Heaplet = std::uint64_t;

struct UnboundedIntError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HeapStructure {
    int num_locs = 1;  // carrier {0..num_locs-1}, 0 is null
    std::vector<long long> ints{0};
    bool ints_exhaustive = true;
    std::vector<std::vector<Value>> heap;  // heap[l] for l >= 1; heap[0] unused
    std::map<std::string, Value> consts;   // nil is implicit
    std::map<std::string, std::set<std::pair<std::vector<Value>, Heaplet>>> preds;
};

using Assignment = std::map<std::string, Value>;

Value eval_term(const HeapStructure& m, const Assignment& v, const TermP& t);
bool satisfies(const HeapStructure& m, const Assignment& v, Heaplet eta, const FormulaP& f);

// One application of the SID transformer to the current interpretations.
std::map<std::string, std::set<std::pair<std::vector<Value>, Heaplet>>> transform(const HeapStructure& m,
                                                                                  const SID& sid);
HeapStructure lfp_interpret(const HeapStructure& m0, const SID& sid, int* iterations = nullptr);
bool is_fixpoint(const HeapStructure& m, const SID& sid);
bool is_determined_heap(const HeapStructure& m);

struct OracleResult {
    bool valid = true;
    int bound = 0;
    HeapStructure model;
    Assignment assignment;
    Heaplet heaplet = 0;
    long long structures = 0;
};

// Predicates are uninterpreted (determined-heap). `axioms` hold at every heaplet.
OracleResult decide_qf_entailment(const std::vector<FormulaP>& gamma, const FormulaP& psi, int bound,
                                  const std::vector<FormulaP>& axioms = {}, int num_fields = 1,
                                  long long budget = 50'000'000);

// ---- finite first-order structures -----------------------------------------

struct FOStructure {
    int num_locs = 1;
    std::vector<long long> ints{0};
    bool ints_exhaustive = true;
    std::map<std::string, Value> consts;            // includes nil
    std::vector<std::vector<Value>> funcs;          // funcs[i][l] = m_{i+1}(l)
    std::map<std::string, std::set<std::vector<Value>>> rels;
};

using FOAssignment = std::map<std::string, Value>;

Value eval_fo_term(const FOStructure& m, const FOAssignment& v, const fo::TermP& t);
bool eval_fo(const FOStructure& m, const FOAssignment& v, const fo::FormulaP& f);

// The corresponding structure M_fo of a determined-heap structure.
FOStructure to_fo(const HeapStructure& m, const std::vector<Sort>& shape);

// ⟦φ⟧ for the heaplet formula phi_eta with free heaplet variable `xs`.
Heaplet heaplet_of(const FOStructure& m, const FOAssignment& v, const fo::FormulaP& phi_eta,
                   const std::string& xs);

}  // namespace wsl
