#pragma once

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qcheck {

enum class Sort { Real, Bool };

// Immutable SMT-LIB term. Copies share structure.
class SmtTerm {
public:
    enum class Kind { Real, Bool, Var, App, Exists, Forall };

    SmtTerm();  // the boolean constant true

    static SmtTerm real(std::string_view literal);
    static SmtTerm real(double value);
    static SmtTerm boolean(bool value);
    static SmtTerm var(std::string name);
    static SmtTerm app(std::string op, std::vector<SmtTerm> args);
    static SmtTerm quant(Kind kind, std::vector<std::string> bound, SmtTerm body);

    [[nodiscard]] Kind kind() const;
    // Constant literal, variable name or operator symbol.
    [[nodiscard]] const std::string& text() const;
    [[nodiscard]] const std::vector<SmtTerm>& args() const;
    [[nodiscard]] const std::vector<std::string>& bound() const;
    // Body of a quantifier.
    [[nodiscard]] const SmtTerm& body() const;

    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const SmtTerm& a, const SmtTerm& b);
    friend bool operator!=(const SmtTerm& a, const SmtTerm& b) { return !(a == b); }

private:
    struct Node;
    explicit SmtTerm(std::shared_ptr<const Node> n);
    std::shared_ptr<const Node> node_;
};

class SmtError : public std::runtime_error {
public:
    SmtError(const std::string& msg, std::size_t offset)
        : std::runtime_error(msg), offset_(offset) {}
    [[nodiscard]] std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// Normalizes a decimal literal: "5" -> "5.0", "-.5" -> "(- 0.5)" is handled by the parser.
std::string normalize_decimal(std::string_view literal);

// Parses one s-expression term. `end` (if given) receives the offset after the term;
// otherwise trailing non-blank input is an error.
SmtTerm parse_smt_term(std::string_view text, std::size_t* end = nullptr);

// Well-sortedness check; throws SmtError (offset 0) when ill-sorted.
Sort sort_of(const SmtTerm& t);

std::set<std::string> free_variables(const SmtTerm& t);

// Capture-avoiding substitution of free variables by terms.
SmtTerm substitute(const SmtTerm& t, const std::map<std::string, SmtTerm>& sub);
SmtTerm rename(const SmtTerm& t, const std::map<std::string, std::string>& names);

bool is_known_operator(std::string_view op);

}  // namespace qcheck
