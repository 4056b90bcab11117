#include "qcheck/model.hpp"

#include <algorithm>
#include <set>

namespace qcheck {

std::string SourceSpan::to_string() const {
    std::string out = file.empty() ? "<input>" : file;
    out += ":" + std::to_string(line) + ":" + std::to_string(column_begin);
    if (column_end > column_begin) out += "-" + std::to_string(column_end);
    return out;
}

std::string Action::to_string() const {
    return sender + " " + receiver + (kind == ActionKind::Output ? " ! " : " ? ") + message;
}

std::string to_string(const Word& w) {
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += " . ";
        out += w[i].to_string();
    }
    return out.empty() ? "<empty>" : out;
}

bool Machine::has_state(const std::string& s) const {
    return std::find(states.begin(), states.end(), s) != states.end();
}

bool Machine::is_accepting(const std::string& s) const {
    return std::find(accepting.begin(), accepting.end(), s) != accepting.end();
}

const QosSpec* Machine::spec(const std::string& s) const {
    auto it = specs.find(s);
    return it == specs.end() ? nullptr : &it->second;
}

const Machine* System::machine(const std::string& name) const {
    for (const auto& m : machines)
        if (m.name == name) return &m;
    return nullptr;
}

const QosAttributeDecl* System::attribute(const std::string& name) const {
    for (const auto& a : attributes)
        if (a.name == name) return &a;
    return nullptr;
}

std::vector<std::string> System::participants() const {
    std::vector<std::string> out;
    for (const auto& m : machines) out.push_back(m.name);
    return out;
}

std::string to_string(const Violation& v) { return v.location + ": " + v.message; }

bool is_order_insensitive(const std::string& op) {
    return op == "+" || op == "*" || op == "min" || op == "max";
}

ValidationReport validate_system(const System& sys) {
    ValidationReport report;
    auto add = [&](std::string loc, std::string msg) {
        report.push_back({std::move(loc), std::move(msg)});
    };

    if (sys.machines.size() < 2) add("system", "fewer than two machines");

    std::set<std::string> attrs;
    for (const auto& a : sys.attributes) {
        if (a.name.empty()) add("attribute", "empty attribute name");
        if (!attrs.insert(a.name).second) add("attribute " + a.name, "duplicate attribute");
        if (a.op.empty()) add("attribute " + a.name, "empty aggregation operator");
    }

    std::set<std::string> names;
    for (const auto& m : sys.machines)
        if (!names.insert(m.name).second) add("machine " + m.name, "duplicate machine");

    for (const auto& m : sys.machines) {
        const std::string where = "machine " + m.name;
        if (m.name.empty()) add(where, "empty machine name");
        std::set<std::string> seen;
        for (const auto& s : m.states)
            if (!seen.insert(s).second) add(where + ", state " + s, "duplicate state");
        if (!m.has_state(m.initial)) add(where, "initial state " + m.initial + " not a state");
        for (const auto& s : m.accepting)
            if (!m.has_state(s)) add(where + ", state " + s, "accepting state not a state");

        for (std::size_t i = 0; i < m.transitions.size(); ++i) {
            const auto& t = m.transitions[i];
            const std::string tw = where + ", transition " + std::to_string(i) + " (" + t.source +
                                   " " + t.action.to_string() + " " + t.target + ")";
            if (!m.has_state(t.source)) add(tw, "unknown source state");
            if (!m.has_state(t.target)) add(tw, "unknown target state");
            if (t.action.subject() != m.name) add(tw, "foreign subject");
            if (t.action.sender == t.action.receiver) add(tw, "sender equals receiver");
            for (const auto* p : {&t.action.sender, &t.action.receiver})
                if (!names.count(*p)) add(tw, "unknown participant " + *p);
        }

        for (const auto& [state, spec] : m.specs) {
            const std::string sw = where + ", state " + state;
            if (!m.has_state(state)) add(sw, "spec on unknown state");
            for (const auto& c : spec.constraints) {
                try {
                    if (sort_of(c) != Sort::Bool) add(sw, "constraint is not boolean: " + c.to_string());
                } catch (const SmtError& e) {
                    add(sw, e.what());
                }
                for (const auto& v : free_variables(c))
                    if (!attrs.count(v)) add(sw, "unknown attribute " + v);
            }
        }
    }
    return report;
}

}  // namespace qcheck
