#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wsl/fo.hpp"
#include "wsl/sl.hpp"
#include "wsl/solver.hpp"

namespace wsl::sym {

// Node index of the integer sort.
inline constexpr int kIntNode = -1;

// LIA formulas and terms use integer variables: "i" in bounds and function
// terms, "i1".."ik" in relation entries.
struct Node {
    std::string name;
    fo::FormulaP bound;
};

struct Elem {
    int node;
    fo::TermP index;
};

struct SymbolicStructure {
    fo::Signature sig;
    std::vector<Node> nodes;  // loc nodes
    int null_node = 0;
    std::map<std::string, Elem> consts;      // includes nil
    std::vector<std::map<int, Elem>> funcs;  // funcs[f][source node]
    std::map<std::string, std::map<std::vector<int>, fo::FormulaP>> rels;  // missing entry: false
};

struct StructureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// A decidable LIA query came back unknown or the solver misbehaved.
struct LiaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LiaContext {
    SolverConfig cfg;
    std::chrono::milliseconds timeout{30000};
    const CancelFlag* cancel = nullptr;
};

// Decides a closed quantified LIA sentence.
bool decide_lia(const fo::FormulaP& sentence, const LiaContext& ctx = {});

fo::FormulaP parse_lia_formula(const std::string& text);
fo::TermP parse_lia_term(const std::string& text);

int node_index(const SymbolicStructure& s, const std::string& name);  // "int" gives kIntNode
std::optional<long long> singleton_value(const fo::FormulaP& bound);

FragmentReport validate_structure(const SymbolicStructure& s, const LiaContext& ctx = {});

// Compiles a closed FO sentence over the structure's vocabulary to LIA.
fo::FormulaP compile_sentence(const SymbolicStructure& s, const fo::FormulaP& sentence);
bool model_check(const SymbolicStructure& s, const fo::FormulaP& sentence, const LiaContext& ctx = {});

bool node_is_infinite(const SymbolicStructure& s, int node, const LiaContext& ctx = {});
bool has_infinite_domain(const SymbolicStructure& s, const LiaContext& ctx = {});

std::string to_json(const SymbolicStructure& s);
SymbolicStructure from_json(const std::string& text);
SymbolicStructure load_structure(const std::string& path);
// Double circles mark nodes listed in `infinite`.
std::string to_dot(const SymbolicStructure& s, const std::vector<int>& infinite);

// ---- model finding ------------------------------------------------------------

// `rays` infinite nodes with bound i >= 0; constants occupy singleton nodes.
struct Template {
    enum Kind { List, Tree } kind = List;
    int rays = 1;
    std::string name() const;
};

std::vector<Template> parse_templates(const std::string& spec);  // e.g. "list:1,list:0,tree:1"
std::vector<Template> default_templates(const fo::Signature& sig);

// Ground literals forced by the antecedent, used to prune skeletons.
struct ForcedLiterals {
    std::vector<std::pair<std::string, std::string>> equal, distinct;
    // (field, source constant) -> target constant
    std::map<std::pair<int, std::string>, std::string> points;
};
ForcedLiterals forced_literals(const fo::Obligation& o);

// A skeleton fixes every discrete choice; integer parameters stay open.
struct Skeleton {
    SymbolicStructure shape;  // relation entries are filled in lazily
    std::vector<std::string> params;
    fo::FormulaP side;  // constraints over params
};

// Enumerates skeletons of a template best-first.
class SkeletonGenerator {
public:
    SkeletonGenerator(const fo::Obligation& o, const Template& t);
    ~SkeletonGenerator();
    std::optional<Skeleton> next();
    size_t produced() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Builds the LIA query for a skeleton: relation entries become parametric.
struct CompiledQuery {
    std::string script;
    std::vector<std::string> params;
    Skeleton skeleton;  // with parametric relation entries
};
CompiledQuery compile_template(const Skeleton& sk, const fo::Obligation& o);
SymbolicStructure instantiate(const Skeleton& sk, const std::map<std::string, long long>& values);

struct FindOptions {
    std::chrono::milliseconds timeout{30000};
    std::chrono::milliseconds per_query{8000};
    SolverConfig cfg;
    const CancelFlag* cancel = nullptr;
    size_t max_skeletons = 100000;
};

struct FindResult {
    std::optional<SymbolicStructure> model;
    std::string template_name;
    size_t skeletons = 0;
    bool timed_out = false;
};

// Every returned structure has passed validation and model checking of all
// obligation sentences; a failure there throws LiaError.
FindResult find_model(const fo::Obligation& o, const std::vector<Template>& templates, const FindOptions& opts);

}  // namespace wsl::sym
