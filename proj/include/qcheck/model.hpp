#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcheck/smt_term.hpp"

namespace qcheck {

struct SourceSpan {
    std::string file;
    std::size_t line = 0;  // 1-based; 0 when the value was built in memory
    std::size_t column_begin = 0;
    std::size_t column_end = 0;

    [[nodiscard]] std::string to_string() const;
};

enum class ActionKind { Output, Input };

struct Action {
    std::string sender;
    std::string receiver;
    ActionKind kind = ActionKind::Output;
    std::string message;

    // The participant that performs the action.
    [[nodiscard]] const std::string& subject() const {
        return kind == ActionKind::Output ? sender : receiver;
    }
    // "A B ! m" / "A B ? m"
    [[nodiscard]] std::string to_string() const;

    friend auto operator<=>(const Action&, const Action&) = default;
};

using Word = std::vector<Action>;

std::string to_string(const Word& w);

struct Transition {
    std::string source;
    Action action;
    std::string target;
    SourceSpan span;

    friend bool operator==(const Transition& a, const Transition& b) {
        return a.source == b.source && a.action == b.action && a.target == b.target;
    }
};

struct QosSpec {
    std::vector<SmtTerm> constraints;
    friend bool operator==(const QosSpec&, const QosSpec&) = default;
};

struct QosAttributeDecl {
    std::string name;
    std::string op;
    friend bool operator==(const QosAttributeDecl&, const QosAttributeDecl&) = default;
};

struct Machine {
    std::string name;
    std::vector<std::string> states;  // states[0] is not necessarily initial
    std::string initial;
    std::vector<std::string> accepting;
    std::vector<Transition> transitions;
    std::map<std::string, QosSpec> specs;

    [[nodiscard]] bool has_state(const std::string& s) const;
    [[nodiscard]] bool is_accepting(const std::string& s) const;
    [[nodiscard]] const QosSpec* spec(const std::string& s) const;

    friend bool operator==(const Machine&, const Machine&) = default;
};

struct System {
    std::vector<QosAttributeDecl> attributes;
    std::vector<Machine> machines;

    [[nodiscard]] const Machine* machine(const std::string& name) const;
    [[nodiscard]] const QosAttributeDecl* attribute(const std::string& name) const;
    [[nodiscard]] std::vector<std::string> participants() const;

    friend bool operator==(const System&, const System&) = default;
};

struct Violation {
    std::string location;
    std::string message;
    friend bool operator==(const Violation&, const Violation&) = default;
};

using ValidationReport = std::vector<Violation>;

ValidationReport validate_system(const System& sys);

std::string to_string(const Violation& v);

// Operators accepted without a warning: their fold does not depend on occurrence order.
bool is_order_insensitive(const std::string& op);

}  // namespace qcheck
