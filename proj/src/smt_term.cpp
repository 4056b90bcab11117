#include "qcheck/smt_term.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>

namespace qcheck {

struct SmtTerm::Node {
    Kind kind;
    std::string text;
    std::vector<SmtTerm> args;
    std::vector<std::string> bound;
};

namespace {

bool is_symbol_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 ||
           std::string_view("~!@$%^&*_-+=<>.?/'").find(c) != std::string_view::npos;
}

bool is_decimal(std::string_view s) {
    if (s.empty()) return false;
    bool digit = false;
    int dots = 0;
    for (char c : s) {
        if (c == '.') {
            ++dots;
        } else if (std::isdigit(static_cast<unsigned char>(c)) != 0) {
            digit = true;
        } else {
            return false;
        }
    }
    return digit && dots <= 1;
}

}  // namespace

std::string normalize_decimal(std::string_view literal) {
    if (!is_decimal(literal)) throw SmtError("malformed decimal '" + std::string(literal) + "'", 0);
    std::string s(literal);
    auto dot = s.find('.');
    if (dot == std::string::npos) {
        s += ".0";
    } else {
        if (dot == 0) s.insert(0, "0");
        if (s.back() == '.') s += "0";
    }
    // strip redundant leading zeros of the integer part
    std::size_t i = 0;
    while (i + 1 < s.size() && s[i] == '0' && s[i + 1] != '.') ++i;
    return s.substr(i);
}

SmtTerm::SmtTerm() : node_(std::make_shared<const Node>(Node{Kind::Bool, "true", {}, {}})) {}

SmtTerm::SmtTerm(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

SmtTerm SmtTerm::real(std::string_view literal) {
    if (!literal.empty() && literal.front() == '-') {
        return app("-", {real(literal.substr(1))});
    }
    return SmtTerm(std::make_shared<const Node>(Node{Kind::Real, normalize_decimal(literal), {}, {}}));
}

SmtTerm SmtTerm::real(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    std::string s(buf, res.ptr);
    if (s.find_first_of("eE") != std::string::npos) {
        res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
        s.assign(buf, res.ptr);
    }
    return real(s);
}

SmtTerm SmtTerm::boolean(bool value) {
    return SmtTerm(std::make_shared<const Node>(Node{Kind::Bool, value ? "true" : "false", {}, {}}));
}

SmtTerm SmtTerm::var(std::string name) {
    return SmtTerm(std::make_shared<const Node>(Node{Kind::Var, std::move(name), {}, {}}));
}

SmtTerm SmtTerm::app(std::string op, std::vector<SmtTerm> args) {
    return SmtTerm(std::make_shared<const Node>(Node{Kind::App, std::move(op), std::move(args), {}}));
}

SmtTerm SmtTerm::quant(Kind kind, std::vector<std::string> bound, SmtTerm body) {
    if (kind != Kind::Exists && kind != Kind::Forall) throw SmtError("not a quantifier kind", 0);
    return SmtTerm(std::make_shared<const Node>(
        Node{kind, kind == Kind::Exists ? "exists" : "forall", {std::move(body)}, std::move(bound)}));
}

SmtTerm::Kind SmtTerm::kind() const { return node_->kind; }
const std::string& SmtTerm::text() const { return node_->text; }
const std::vector<SmtTerm>& SmtTerm::args() const { return node_->args; }
const std::vector<std::string>& SmtTerm::bound() const { return node_->bound; }
const SmtTerm& SmtTerm::body() const { return node_->args.front(); }

std::string SmtTerm::to_string() const {
    switch (kind()) {
    case Kind::Real:
    case Kind::Bool:
    case Kind::Var:
        return text();
    case Kind::App: {
        std::string out = "(" + text();
        for (const auto& a : args()) out += " " + a.to_string();
        return out + ")";
    }
    case Kind::Exists:
    case Kind::Forall: {
        std::string out = "(" + text() + " (";
        for (std::size_t i = 0; i < bound().size(); ++i) {
            if (i) out += " ";
            out += "(" + bound()[i] + " Real)";
        }
        return out + ") " + body().to_string() + ")";
    }
    }
    return {};
}

bool operator==(const SmtTerm& a, const SmtTerm& b) {
    if (a.node_ == b.node_) return true;
    return a.kind() == b.kind() && a.text() == b.text() && a.bound() == b.bound() &&
           a.args() == b.args();
}

bool is_known_operator(std::string_view op) {
    static const std::set<std::string_view> ops = {"+", "-", "*", "/", "=",   "<",  "<=", ">",
                                                   ">=", "and", "or", "not", "=>", "ite"};
    return ops.count(op) > 0;
}

namespace {

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    SmtTerm term() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of term");
        if (s_[pos_] == '(') return list();
        if (s_[pos_] == ')') fail("unexpected ')'");
        std::size_t at = pos_;
        std::string tok = symbol();
        if (tok == "true" || tok == "false") return SmtTerm::boolean(tok == "true");
        if (std::isdigit(static_cast<unsigned char>(tok[0])) || tok[0] == '.') {
            if (!is_decimal(tok)) fail_at("malformed number '" + tok + "'", at);
            return SmtTerm::real(tok);
        }
        if (tok[0] == '-' && tok.size() > 1 && is_decimal(tok.substr(1))) return SmtTerm::real(tok);
        if (!(std::isalpha(static_cast<unsigned char>(tok[0])) || tok[0] == '_'))
            fail_at("unexpected symbol '" + tok + "'", at);
        return SmtTerm::var(tok);
    }

    void skip() {
        while (pos_ < s_.size()) {
            if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
                ++pos_;
            } else if (s_[pos_] == ';') {
                while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::size_t pos() const { return pos_; }

private:
    [[noreturn]] void fail(const std::string& m) { throw SmtError(m, pos_); }
    [[noreturn]] void fail_at(const std::string& m, std::size_t at) { throw SmtError(m, at); }

    std::string symbol() {
        std::size_t start = pos_;
        if (pos_ >= s_.size()) fail("unexpected end of term");
        while (pos_ < s_.size() && is_symbol_char(s_[pos_])) ++pos_;
        if (start == pos_) fail(std::string("unexpected character '") + s_[pos_] + "'");
        return std::string(s_.substr(start, pos_ - start));
    }

    void expect(char c) {
        skip();
        if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    SmtTerm list() {
        expect('(');
        skip();
        std::size_t at = pos_;
        if (pos_ < s_.size() && s_[pos_] == '(') fail("operator expected");
        std::string op = symbol();
        if (op == "exists" || op == "forall") {
            std::vector<std::string> bound;
            expect('(');
            skip();
            while (pos_ < s_.size() && s_[pos_] == '(') {
                ++pos_;
                skip();
                bound.push_back(symbol());
                skip();
                std::size_t sat = pos_;
                if (symbol() != "Real") fail_at("bound variables must have sort Real", sat);
                expect(')');
                skip();
            }
            expect(')');
            if (bound.empty()) fail_at("quantifier without bound variables", at);
            SmtTerm body = term();
            expect(')');
            return SmtTerm::quant(op == "exists" ? SmtTerm::Kind::Exists : SmtTerm::Kind::Forall,
                                  std::move(bound), std::move(body));
        }
        if (!is_known_operator(op)) fail_at("unknown operator '" + op + "'", at);
        std::vector<SmtTerm> args;
        skip();
        while (pos_ < s_.size() && s_[pos_] != ')') {
            args.push_back(term());
            skip();
        }
        expect(')');
        SmtTerm t = SmtTerm::app(op, std::move(args));
        try {
            sort_of(t);
        } catch (const SmtError& e) {
            throw SmtError(e.what(), at);
        }
        return t;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

SmtTerm parse_smt_term(std::string_view text, std::size_t* end) {
    Parser p(text);
    SmtTerm t = p.term();
    if (end) {
        *end = p.pos();
        return t;
    }
    p.skip();
    if (p.pos() != text.size()) {
        throw SmtError("trailing input after term", p.pos());
    }
    return t;
}

Sort sort_of(const SmtTerm& t) {
    using K = SmtTerm::Kind;
    auto need = [&](bool ok, const std::string& what) {
        if (!ok) throw SmtError("ill-sorted term " + t.to_string() + ": " + what, 0);
    };
    switch (t.kind()) {
    case K::Real:
    case K::Var:
        return Sort::Real;
    case K::Bool:
        return Sort::Bool;
    case K::Exists:
    case K::Forall:
        need(sort_of(t.body()) == Sort::Bool, "quantifier body must be boolean");
        return Sort::Bool;
    case K::App:
        break;
    }
    const std::string& op = t.text();
    const auto& a = t.args();
    auto all = [&](Sort s) {
        return std::all_of(a.begin(), a.end(), [&](const SmtTerm& x) { return sort_of(x) == s; });
    };
    if (op == "+" || op == "*" || op == "/") {
        need(a.size() >= (op == "/" ? 2u : 1u) && all(Sort::Real), "arithmetic over reals");
        return Sort::Real;
    }
    if (op == "-") {
        need(!a.empty() && all(Sort::Real), "arithmetic over reals");
        return Sort::Real;
    }
    if (op == "<" || op == "<=" || op == ">" || op == ">=") {
        need(a.size() >= 2 && all(Sort::Real), "comparison over reals");
        return Sort::Bool;
    }
    if (op == "=") {
        need(a.size() >= 2 && (all(Sort::Real) || all(Sort::Bool)), "equality over one sort");
        return Sort::Bool;
    }
    if (op == "and" || op == "or") {
        need(!a.empty() && all(Sort::Bool), "connective over booleans");
        return Sort::Bool;
    }
    if (op == "not") {
        need(a.size() == 1 && all(Sort::Bool), "negation of a boolean");
        return Sort::Bool;
    }
    if (op == "=>") {
        need(a.size() >= 2 && all(Sort::Bool), "implication over booleans");
        return Sort::Bool;
    }
    if (op == "ite") {
        need(a.size() == 3 && sort_of(a[0]) == Sort::Bool && sort_of(a[1]) == sort_of(a[2]),
             "ite needs a boolean guard and branches of one sort");
        return sort_of(a[1]);
    }
    // user-declared aggregation operators act on reals
    need(all(Sort::Real), "operator '" + op + "' over reals");
    return Sort::Real;
}

namespace {

void collect_free(const SmtTerm& t, std::set<std::string>& bound, std::set<std::string>& out) {
    switch (t.kind()) {
    case SmtTerm::Kind::Var:
        if (!bound.count(t.text())) out.insert(t.text());
        return;
    case SmtTerm::Kind::Exists:
    case SmtTerm::Kind::Forall: {
        std::vector<std::string> added;
        for (const auto& b : t.bound())
            if (bound.insert(b).second) added.push_back(b);
        collect_free(t.body(), bound, out);
        for (const auto& b : added) bound.erase(b);
        return;
    }
    default:
        for (const auto& a : t.args()) collect_free(a, bound, out);
    }
}

}  // namespace

std::set<std::string> free_variables(const SmtTerm& t) {
    std::set<std::string> bound, out;
    collect_free(t, bound, out);
    return out;
}

SmtTerm substitute(const SmtTerm& t, const std::map<std::string, SmtTerm>& sub) {
    if (sub.empty()) return t;
    switch (t.kind()) {
    case SmtTerm::Kind::Real:
    case SmtTerm::Kind::Bool:
        return t;
    case SmtTerm::Kind::Var: {
        auto it = sub.find(t.text());
        return it == sub.end() ? t : it->second;
    }
    case SmtTerm::Kind::App: {
        std::vector<SmtTerm> args;
        args.reserve(t.args().size());
        for (const auto& a : t.args()) args.push_back(substitute(a, sub));
        return SmtTerm::app(t.text(), std::move(args));
    }
    case SmtTerm::Kind::Exists:
    case SmtTerm::Kind::Forall: {
        std::map<std::string, SmtTerm> inner = sub;
        for (const auto& b : t.bound()) inner.erase(b);
        std::set<std::string> body_free = free_variables(t.body());
        std::set<std::string> incoming;  // variables introduced by the replacements
        for (const auto& [name, repl] : inner) {
            if (!body_free.count(name)) continue;
            auto fv = free_variables(repl);
            incoming.insert(fv.begin(), fv.end());
        }
        std::vector<std::string> bound = t.bound();
        for (auto& b : bound) {
            if (!incoming.count(b)) continue;
            std::string fresh;
            for (int i = 0;; ++i) {
                fresh = b + "!" + std::to_string(i);
                if (!incoming.count(fresh) && !body_free.count(fresh) &&
                    std::find(bound.begin(), bound.end(), fresh) == bound.end())
                    break;
            }
            inner[b] = SmtTerm::var(fresh);
            b = fresh;
        }
        return SmtTerm::quant(t.kind(), std::move(bound), substitute(t.body(), inner));
    }
    }
    return t;
}

SmtTerm rename(const SmtTerm& t, const std::map<std::string, std::string>& names) {
    std::map<std::string, SmtTerm> sub;
    for (const auto& [from, to] : names) sub.emplace(from, SmtTerm::var(to));
    return substitute(t, sub);
}

}  // namespace qcheck
