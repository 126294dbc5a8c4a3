#include "wsl/sexpr.hpp"

#include <cctype>

namespace wsl {

std::string SExpr::str() const {
    if (!is_list) return atom;
    std::string s = "(";
    for (size_t i = 0; i < items.size(); ++i) s += (i ? " " : "") + items[i].str();
    return s + ")";
}

namespace {

struct Reader {
    const std::string& s;
    size_t i = 0;

    void skip() {
        while (i < s.size()) {
            if (std::isspace(static_cast<unsigned char>(s[i])))
                ++i;
            else if (s[i] == ';')
                while (i < s.size() && s[i] != '\n') ++i;
            else
                break;
        }
    }

    SExpr read() {
        skip();
        if (i >= s.size()) throw SExprError("unexpected end of s-expression");
        SExpr e;
        if (s[i] == '(') {
            ++i;
            e.is_list = true;
            while (true) {
                skip();
                if (i >= s.size()) throw SExprError("unbalanced parenthesis");
                if (s[i] == ')') {
                    ++i;
                    break;
                }
                e.items.push_back(read());
            }
            return e;
        }
        if (s[i] == ')') throw SExprError("unexpected ')'");
        if (s[i] == '|') {
            size_t j = s.find('|', i + 1);
            if (j == std::string::npos) throw SExprError("unterminated quoted symbol");
            e.atom = s.substr(i + 1, j - i - 1);
            i = j + 1;
            return e;
        }
        if (s[i] == '"') {
            size_t j = i + 1;
            while (j < s.size()) {
                if (s[j] == '"') {
                    if (j + 1 < s.size() && s[j + 1] == '"') {
                        j += 2;
                        continue;
                    }
                    break;
                }
                ++j;
            }
            if (j >= s.size()) throw SExprError("unterminated string");
            e.atom = s.substr(i, j - i + 1);
            i = j + 1;
            return e;
        }
        size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != '(' && s[j] != ')' &&
               s[j] != ';')
            ++j;
        e.atom = s.substr(i, j - i);
        i = j;
        return e;
    }
};

}  // namespace

std::vector<SExpr> parse_sexprs(const std::string& text) {
    Reader r{text};
    std::vector<SExpr> out;
    while (true) {
        r.skip();
        if (r.i >= text.size()) break;
        out.push_back(r.read());
    }
    return out;
}

SExpr parse_sexpr(const std::string& text) {
    auto v = parse_sexprs(text);
    if (v.size() != 1) throw SExprError("expected exactly one s-expression");
    return v[0];
}

}  // namespace wsl
