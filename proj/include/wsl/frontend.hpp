#pragma once

#include <stdexcept>
#include <string>

#include "wsl/sl.hpp"

namespace wsl {

struct ParseError : std::runtime_error {
    int line, col;
    ParseError(const std::string& msg, int line, int col)
        : std::runtime_error(msg), line(line), col(col) {}
};

struct Problem {
    Vocabulary vocab;
    SID sid;
    std::vector<FormulaP> antecedents;
    FormulaP consequent;
    std::map<std::string, Sort> program_constants;  // free query variables
    int query_line = 0;
};

// `allow_reserved` admits identifiers starting with '_' (used when re-reading
// our own printed axioms).
Problem parse_problem(const std::string& text, bool allow_reserved = false);
Problem parse_problem_file(const std::string& path);

std::string print(const TermP& t);
std::string print(const FormulaP& f);
std::string print(const FormulaP& f, const std::string& record);
std::string print(const PredDef& d);
std::string print(const Problem& p);

bool problem_equal(const Problem& a, const Problem& b);

}  // namespace wsl
