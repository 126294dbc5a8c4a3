#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wsl/finite.hpp"
#include "wsl/fo.hpp"
#include "wsl/sl.hpp"
#include "wsl/symbolic.hpp"

namespace wsl::report {

struct AssertionVerdict {
    fo::Tag tag;
    std::string label;
    bool holds;
};

struct Certificate {
    std::optional<sym::SymbolicStructure> symbolic;
    std::optional<FOStructure> finite;
    std::vector<std::string> loc_names;  // finite models
    std::vector<AssertionVerdict> verdicts;
    std::vector<std::string> infinite_nodes;
    bool rogue = false;
    std::string rogue_note;
    int archetype = 0;  // 0: unknown
    bool boundary = false;
    std::string violated;  // consequent being refuted
    std::string template_name;
};

struct CertificationError : std::runtime_error {
    std::vector<AssertionVerdict> verdicts;
    CertificationError(const std::string& m, std::vector<AssertionVerdict> v)
        : std::runtime_error(m), verdicts(std::move(v)) {}
};

// Both throw CertificationError when some obligation sentence fails.
// `sid` enables the LFP comparison for finite models.
Certificate certify(const sym::SymbolicStructure& s, const fo::Obligation& o, const SID* sid,
                    const sym::LiaContext& ctx = {});
Certificate certify(const FOStructure& m, const std::vector<std::string>& names, const fo::Obligation& o,
                    const SID* sid);

// Archetypes 1-6 of the rogue-model taxonomy; 0 when no pattern matches.
int classify_archetype(const sym::SymbolicStructure& s, const sym::LiaContext& ctx = {}, bool* boundary = nullptr);
const char* archetype_description(int a);

// Explication of a structure whose loc nodes are all singletons.
std::optional<FOStructure> explicate_finite(const sym::SymbolicStructure& s, std::vector<std::string>* names);

std::string render_json(const Certificate& c);
std::string render_dot(const Certificate& c);
std::string render_text(const Certificate& c);

}  // namespace wsl::report
