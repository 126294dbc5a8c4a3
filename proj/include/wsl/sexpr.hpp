#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace wsl {

struct SExpr {
    bool is_list = false;
    std::string atom;  // symbols keep their text without '|' quotes
    std::vector<SExpr> items;

    bool is(const std::string& s) const { return !is_list && atom == s; }
    const SExpr& operator[](size_t i) const { return items.at(i); }
    size_t size() const { return items.size(); }
    std::string str() const;
};

struct SExprError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parses all top-level expressions; ';' comments are skipped.
std::vector<SExpr> parse_sexprs(const std::string& text);
SExpr parse_sexpr(const std::string& text);

}  // namespace wsl
