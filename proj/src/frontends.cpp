#include "qcheck/frontends.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace qcheck {

namespace {

struct Token {
    enum class Type { Word, Punct, Arrow, Implies, End };
    Type type = Type::End;
    std::string text;
    std::size_t offset = 0;
};

bool word_start(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '.' || c == '\'';
}

class Lexer {
public:
    Lexer(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {
        line_starts_.push_back(0);
        for (std::size_t i = 0; i < text_.size(); ++i)
            if (text_[i] == '\n') line_starts_.push_back(i + 1);
    }

    SourceSpan span(std::size_t offset, std::size_t length) const {
        auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
        const std::size_t line = static_cast<std::size_t>(it - line_starts_.begin());
        const std::size_t col = offset - line_starts_[line - 1] + 1;
        return {file_, line, col, col + length};
    }
    SourceSpan span(const Token& t) const { return span(t.offset, std::max<std::size_t>(t.text.size(), 1)); }

    [[noreturn]] void fail(const std::string& msg, const Token& at) const { throw ParseError(msg, span(at)); }
    [[noreturn]] void fail_at(const std::string& msg, std::size_t offset) const {
        throw ParseError(msg, span(offset, 1));
    }

    const Token& peek() {
        if (!peeked_) {
            look_ = scan();
            peeked_ = true;
        }
        return look_;
    }

    Token next() {
        Token t = peek();
        peeked_ = false;
        return t;
    }

    bool at(std::string_view text) { return peek().type != Token::Type::End && peek().text == text; }
    bool at_end() { return peek().type == Token::Type::End; }

    bool accept(std::string_view text) {
        if (!at(text)) return false;
        next();
        return true;
    }

    Token expect(std::string_view text) {
        if (!at(text)) fail("expected '" + std::string(text) + "', found " + describe(peek()), peek());
        return next();
    }

    Token word(const std::string& what) {
        if (peek().type != Token::Type::Word) fail("expected " + what + ", found " + describe(peek()), peek());
        return next();
    }

    static std::string describe(const Token& t) {
        return t.type == Token::Type::End ? "end of input" : "'" + t.text + "'";
    }

    // Reads one SMT-LIB term at the current position.
    SmtTerm sexpr(SourceSpan* where = nullptr) {
        if (peeked_) {
            pos_ = look_.offset;
            peeked_ = false;
        }
        skip();
        const std::size_t start = pos_;
        if (pos_ >= text_.size()) fail_at("expected an SMT-LIB term, found end of input", pos_);
        std::size_t end = 0;
        SmtTerm t;
        try {
            t = parse_smt_term(text_.substr(pos_), &end);
        } catch (const SmtError& e) {
            fail_at(e.what(), start + e.offset());
        }
        pos_ = start + end;
        if (where) *where = span(start, end);
        return t;
    }

    std::size_t line_of(const Token& t) const { return span(t).line; }

private:
    void skip() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    bool dash_joins(std::size_t i) const {
        return i + 1 < text_.size() && text_[i] == '-' &&
               std::isalnum(static_cast<unsigned char>(text_[i + 1])) != 0;
    }

    Token scan() {
        skip();
        Token t;
        t.offset = pos_;
        if (pos_ >= text_.size()) return t;
        const char c = text_[pos_];
        if (word_start(c) || dash_joins(pos_)) {
            std::size_t start = pos_++;
            while (pos_ < text_.size() && (word_start(text_[pos_]) || dash_joins(pos_))) ++pos_;
            t.type = Token::Type::Word;
            t.text = std::string(text_.substr(start, pos_ - start));
            return t;
        }
        if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
            pos_ += 2;
            t.type = Token::Type::Arrow;
            t.text = "->";
            return t;
        }
        if (c == '=' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
            pos_ += 2;
            t.type = Token::Type::Implies;
            t.text = "=>";
            return t;
        }
        ++pos_;
        t.type = Token::Type::Punct;
        t.text = std::string(1, c);
        return t;
    }

    std::string_view text_;
    std::string file_;
    std::vector<std::size_t> line_starts_;
    std::size_t pos_ = 0;
    bool peeked_ = false;
    Token look_;
};

bool is_identifier(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
    });
}

void check_attributes(Lexer& lx, const SmtTerm& t, const SourceSpan& where,
                      const std::vector<QosAttributeDecl>& attrs) {
    for (const auto& v : free_variables(t)) {
        bool known = std::any_of(attrs.begin(), attrs.end(), [&](const QosAttributeDecl& a) { return a.name == v; });
        if (!known) throw ParseError("undeclared attribute '" + v + "'", where);
    }
    (void)lx;
}

SmtTerm boolean_term(Lexer& lx, SourceSpan& where) {
    SmtTerm t = lx.sexpr(&where);
    try {
        if (sort_of(t) != Sort::Bool) throw ParseError("constraint is not boolean", where);
    } catch (const SmtError& e) {
        throw ParseError(e.what(), where);
    }
    return t;
}

// qos { attr : op, ... }
std::vector<QosAttributeDecl> parse_qos_env(Lexer& lx) {
    std::vector<QosAttributeDecl> attrs;
    lx.expect("qos");
    lx.expect("{");
    if (lx.accept("}")) return attrs;
    do {
        Token name = lx.word("attribute name");
        if (!is_identifier(name.text)) lx.fail("malformed attribute name '" + name.text + "'", name);
        for (const auto& a : attrs)
            if (a.name == name.text) lx.fail("duplicate attribute '" + name.text + "'", name);
        lx.expect(":");
        Token op = lx.next();
        if (op.type == Token::Type::End || op.text == "," || op.text == "}")
            lx.fail("expected an aggregation operator", op);
        attrs.push_back({name.text, op.text});
    } while (lx.accept(","));
    lx.expect("}");
    return attrs;
}

// ---------------------------------------------------------------- g-choreographies

class GChorParser {
public:
    GChorParser(Lexer& lx, bool annotations, const std::vector<QosAttributeDecl>* attrs)
        : lx_(lx), annotations_(annotations), attrs_(attrs) {}

    GChor choice() {
        GChor g = par();
        while (lx_.at("+")) {
            Token t = lx_.next();
            g = GChor::choice(g, par()).with_span(lx_.span(t));
        }
        return g;
    }

private:
    GChor par() {
        GChor g = seq();
        while (lx_.at("|")) {
            Token t = lx_.next();
            g = GChor::par(g, seq()).with_span(lx_.span(t));
        }
        return g;
    }

    GChor seq() {
        GChor g = postfix();
        while (lx_.at(";")) {
            Token t = lx_.next();
            g = GChor::seq(g, postfix()).with_span(lx_.span(t));
        }
        return g;
    }

    GChor postfix() {
        GChor g = atom();
        while (lx_.at("*")) {
            Token t = lx_.next();
            g = GChor::star(g).with_span(lx_.span(t));
        }
        if (lx_.at("[") && annotations_) lx_.fail("slot on non-interaction", lx_.peek());
        return g;
    }

    GChor block(const Token& open) {
        const std::string close = open.text == "(" ? ")" : "}";
        GChor g = choice();
        lx_.expect(close);
        return g;
    }

    GChor atom() {
        Token t = lx_.peek();
        if (t.text == "{" || t.text == "(") {
            lx_.next();
            return block(t);
        }
        if (t.type != Token::Type::Word) lx_.fail("expected a g-choreography, found " + Lexer::describe(t), t);
        if (t.text == "break") {
            lx_.next();
            return GChor::brk().with_span(lx_.span(t));
        }
        if (t.text == "skip") {
            lx_.next();
            return GChor::empty().with_span(lx_.span(t));
        }
        if (t.text == "repeat" || t.text == "repeat1" || t.text == "sel") {
            lx_.next();
            if (lx_.peek().type == Token::Type::Word) lx_.next();  // optional participant, as in ChorGram
            Token open = lx_.expect("{");
            GChor body = block(open);
            if (t.text == "sel") return body;
            return (t.text == "repeat" ? GChor::star(body) : GChor::repeat1(body)).with_span(lx_.span(t));
        }
        Token sender = lx_.next();
        if (!is_identifier(sender.text)) lx_.fail("malformed participant name '" + sender.text + "'", sender);
        lx_.expect("->");
        Token receiver = lx_.word("receiver");
        if (!is_identifier(receiver.text)) lx_.fail("malformed participant name '" + receiver.text + "'", receiver);
        lx_.expect(":");
        Token msg = lx_.word("message");
        if (!is_identifier(msg.text)) lx_.fail("malformed message name '" + msg.text + "'", msg);
        if (sender.text == receiver.text) lx_.fail("sender and receiver coincide", receiver);
        InteractionQos qos;
        if (annotations_ && lx_.at("[")) qos = slots();
        return GChor::interaction(sender.text, receiver.text, msg.text, std::move(qos)).with_span(lx_.span(sender));
    }

    InteractionQos slots() {
        InteractionQos q;
        lx_.expect("[");
        do {
            Token name = lx_.word("slot name");
            std::optional<QosSpec>* slot = nullptr;
            if (name.text == "sqos") slot = &q.sqos;
            else if (name.text == "rqos") slot = &q.rqos;
            else if (name.text == "sqos'") slot = &q.sqos_post;
            else if (name.text == "rqos'") slot = &q.rqos_post;
            else lx_.fail("unknown slot '" + name.text + "'", name);
            if (slot->has_value()) lx_.fail("duplicate slot '" + name.text + "'", name);
            lx_.expect(":");
            QosSpec spec;
            do {
                SourceSpan where;
                SmtTerm c = boolean_term(lx_, where);
                if (attrs_) check_attributes(lx_, c, where, *attrs_);
                spec.constraints.push_back(c);
            } while (!lx_.at(",") && !lx_.at("]") && !lx_.at_end());
            *slot = std::move(spec);
        } while (lx_.accept(","));
        lx_.expect("]");
        return q;
    }

    Lexer& lx_;
    bool annotations_;
    const std::vector<QosAttributeDecl>* attrs_;
};

// ---------------------------------------------------------------- QL

class QlParser {
public:
    explicit QlParser(Lexer& lx) : lx_(lx) {}

    Formula implication() {
        Formula f = until();
        if (lx_.at("=>")) {
            Token t = lx_.next();
            return Formula::implication(f, implication()).with_span(lx_.span(t));
        }
        return f;
    }

private:
    Formula until() {
        Formula f = disjunction();
        if (lx_.at("until")) {
            Token t = lx_.next();
            lx_.expect("{");
            GChor g = GChorParser(lx_, false, nullptr).choice();
            lx_.expect("}");
            return Formula::until(f, g, until()).with_span(lx_.span(t));
        }
        return f;
    }

    Formula disjunction() {
        Formula f = conjunction();
        while (lx_.at("or")) {
            Token t = lx_.next();
            f = Formula::disjunction(f, conjunction()).with_span(lx_.span(t));
        }
        return f;
    }

    Formula conjunction() {
        Formula f = unary();
        while (lx_.at("and")) {
            Token t = lx_.next();
            f = Formula::conjunction(f, unary()).with_span(lx_.span(t));
        }
        return f;
    }

    Formula unary() {
        Token t = lx_.peek();
        if (t.text == "not" && t.type == Token::Type::Word) {
            lx_.next();
            return Formula::negation(unary()).with_span(lx_.span(t));
        }
        if (t.text == "<" || t.text == "[") {
            lx_.next();
            GChor g = GChorParser(lx_, false, nullptr).choice();
            lx_.expect(t.text == "<" ? ">" : "]");
            Formula f = unary();
            return (t.text == "<" ? Formula::possibly(g, f) : Formula::necessarily(g, f)).with_span(lx_.span(t));
        }
        return atom();
    }

    Formula atom() {
        Token t = lx_.peek();
        if (t.type == Token::Type::Word && t.text == "true") {
            lx_.next();
            return Formula::truth().with_span(lx_.span(t));
        }
        if (t.type == Token::Type::Word && t.text == "false") {
            lx_.next();
            return Formula::falsity().with_span(lx_.span(t));
        }
        if (t.type == Token::Type::Word && t.text == "qos") {
            lx_.next();
            SourceSpan where;
            SmtTerm psi = boolean_term(lx_, where);
            return Formula::atomic(psi).with_span(where);
        }
        if (t.text == "(") {
            lx_.next();
            Formula f = implication();
            lx_.expect(")");
            return f;
        }
        lx_.fail("expected a formula, found " + Lexer::describe(t), t);
    }

    Lexer& lx_;
};

// ---------------------------------------------------------------- .qosfsa

struct RawTransition {
    Token source, partner, dir, message, target;
};

struct RawMachine {
    Token name;
    std::vector<RawTransition> transitions;
    std::vector<Token> states;  // optional explicit order
    Token marking;
};

RawMachine parse_machine(Lexer& lx) {
    RawMachine m;
    lx.expect(".outputs");
    m.name = lx.word("machine name");
    if (!is_identifier(m.name.text)) lx.fail("malformed machine name '" + m.name.text + "'", m.name);
    lx.expect(".state");
    lx.expect("graph");
    bool marked = false;
    while (!lx.at_end()) {
        if (lx.at(".marking")) {
            lx.next();
            m.marking = lx.word("initial state");
            marked = true;
            continue;
        }
        if (lx.at(".states")) {
            Token d = lx.next();
            const std::size_t line = lx.line_of(d);
            while (lx.peek().type == Token::Type::Word && lx.line_of(lx.peek()) == line) m.states.push_back(lx.next());
            continue;
        }
        if (lx.at(".end")) {
            lx.next();
            if (!marked) lx.fail("machine without .marking", m.name);
            return m;
        }
        RawTransition t;
        t.source = lx.word("source state");
        t.partner = lx.word("partner index");
        t.dir = lx.next();
        if (t.dir.text != "!" && t.dir.text != "?") lx.fail("expected '!' or '?'", t.dir);
        t.message = lx.word("message");
        if (!is_identifier(t.message.text)) lx.fail("malformed message name '" + t.message.text + "'", t.message);
        t.target = lx.word("target state");
        m.transitions.push_back(t);
    }
    lx.fail("machine " + m.name.text + " lacks .end", m.name);
}

}  // namespace

System parse_qosfsa(std::string_view text, const std::string& file) {
    Lexer lx(text, file);
    System sys;
    std::vector<RawMachine> raws;
    lx.expect("fsa");
    lx.expect("{");
    while (!lx.at("}")) {
        if (lx.at_end()) lx.fail("unterminated fsa block", lx.peek());
        RawMachine m = parse_machine(lx);
        for (const auto& r : raws)
            if (r.name.text == m.name.text) lx.fail("duplicate machine '" + m.name.text + "'", m.name);
        raws.push_back(std::move(m));
    }
    lx.expect("}");

    for (const auto& r : raws) {
        Machine m;
        m.name = r.name.text;
        m.initial = r.marking.text;
        auto add_state = [&](const std::string& s) {
            if (!m.has_state(s)) m.states.push_back(s);
        };
        if (!r.states.empty()) {
            for (const auto& s : r.states) {
                if (m.has_state(s.text)) lx.fail("duplicate state '" + s.text + "'", s);
                m.states.push_back(s.text);
            }
        }
        add_state(m.initial);
        for (const auto& t : r.transitions) {
            if (!r.states.empty()) {
                for (const Token* s : {&t.source, &t.target})
                    if (!m.has_state(s->text)) lx.fail("state '" + s->text + "' missing from .states", *s);
            }
            add_state(t.source.text);
            add_state(t.target.text);
            std::size_t idx = 0;
            const std::string& p = t.partner.text;
            if (p.empty() || !std::all_of(p.begin(), p.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }))
                lx.fail("malformed partner index '" + p + "'", t.partner);
            idx = std::stoul(p);
            if (idx >= raws.size()) lx.fail("unknown partner index " + p, t.partner);
            const std::string& partner = raws[idx].name.text;
            if (partner == m.name) lx.fail("machine communicates with itself", t.partner);
            Transition tr;
            tr.source = t.source.text;
            tr.target = t.target.text;
            tr.action.message = t.message.text;
            if (t.dir.text == "!") {
                tr.action = {m.name, partner, ActionKind::Output, t.message.text};
            } else {
                tr.action = {partner, m.name, ActionKind::Input, t.message.text};
            }
            tr.span = lx.span(t.source);
            m.transitions.push_back(tr);
        }
        sys.machines.push_back(std::move(m));
    }

    auto machine_of = [&](const Token& name) -> Machine& {
        for (auto& m : sys.machines)
            if (m.name == name.text) return m;
        lx.fail("unknown machine '" + name.text + "'", name);
    };

    bool seen_qos = false, seen_specs = false, seen_finals = false;
    struct PendingSpec {
        Token machine, state;
        SmtTerm term;
        SourceSpan where;
    };
    std::vector<PendingSpec> specs;
    while (!lx.at_end()) {
        Token section = lx.peek();
        if (section.text == "qos") {
            if (seen_qos) lx.fail("duplicate qos section", section);
            seen_qos = true;
            sys.attributes = parse_qos_env(lx);
        } else if (section.text == "specs") {
            if (seen_specs) lx.fail("duplicate specs section", section);
            seen_specs = true;
            lx.next();
            lx.expect("{");
            if (!lx.accept("}")) {
                do {
                    PendingSpec p;
                    p.machine = lx.word("machine name");
                    lx.expect("@");
                    p.state = lx.word("state");
                    lx.expect(":");
                    p.term = boolean_term(lx, p.where);
                    specs.push_back(std::move(p));
                } while (lx.accept(","));
                lx.expect("}");
            }
        } else if (section.text == "finals") {
            if (seen_finals) lx.fail("duplicate finals section", section);
            seen_finals = true;
            lx.next();
            lx.expect("{");
            if (!lx.accept("}")) {
                do {
                    Token name = lx.word("machine name");
                    Machine& m = machine_of(name);
                    lx.expect(":");
                    lx.expect("[");
                    if (!lx.at("]")) {
                        do {
                            Token s = lx.word("state");
                            if (!m.has_state(s.text)) lx.fail("final state '" + s.text + "' unknown in " + m.name, s);
                            if (!m.is_accepting(s.text)) m.accepting.push_back(s.text);
                        } while (lx.accept(","));
                    }
                    lx.expect("]");
                } while (lx.accept(","));
                lx.expect("}");
            }
        } else {
            lx.fail("expected a qos, specs or finals section, found " + Lexer::describe(section), section);
        }
    }
    for (const auto& p : specs) {
        Machine& m = machine_of(p.machine);
        if (!m.has_state(p.state.text)) lx.fail("spec on unknown state '" + p.state.text + "' of " + m.name, p.state);
        check_attributes(lx, p.term, p.where, sys.attributes);
        m.specs[p.state.text].constraints.push_back(p.term);
    }
    if (sys.machines.size() < 2) throw ParseError("a system needs at least two machines", lx.span(0, 1));
    ValidationReport report = validate_system(sys);
    if (!report.empty()) throw ParseError(to_string(report.front()), lx.span(0, 1));
    return sys;
}

std::string serialize_qosfsa(const System& sys) {
    std::ostringstream out;
    out << "fsa {\n";
    for (const auto& m : sys.machines) {
        out << ".outputs " << m.name << "\n.state graph\n";
        std::vector<std::string> derived{m.initial};
        for (const auto& t : m.transitions)
            for (const auto* s : {&t.source, &t.target})
                if (std::find(derived.begin(), derived.end(), *s) == derived.end()) derived.push_back(*s);
        if (derived != m.states) {
            out << ".states";
            for (const auto& s : m.states) out << " " << s;
            out << "\n";
        }
        for (const auto& t : m.transitions) {
            const bool output = t.action.kind == ActionKind::Output;
            const std::string& partner = output ? t.action.receiver : t.action.sender;
            std::size_t idx = 0;
            while (idx < sys.machines.size() && sys.machines[idx].name != partner) ++idx;
            out << t.source << " " << idx << " " << (output ? "!" : "?") << " " << t.action.message << " "
                << t.target << "\n";
        }
        out << ".marking " << m.initial << "\n.end\n";
    }
    out << "}\n";
    out << "qos {";
    for (std::size_t i = 0; i < sys.attributes.size(); ++i)
        out << (i ? ", " : " ") << sys.attributes[i].name << " : " << sys.attributes[i].op;
    out << (sys.attributes.empty() ? "}\n" : " }\n");
    std::vector<std::string> entries;
    for (const auto& m : sys.machines)
        for (const auto& s : m.states) {
            const QosSpec* spec = m.spec(s);
            if (!spec) continue;
            if (spec->constraints.empty()) entries.push_back(m.name + "@" + s + " : true");
            for (const auto& c : spec->constraints) entries.push_back(m.name + "@" + s + " : " + c.to_string());
        }
    out << "specs {";
    for (std::size_t i = 0; i < entries.size(); ++i) out << (i ? ",\n  " : "\n  ") << entries[i];
    out << (entries.empty() ? "}\n" : "\n}\n");
    out << "finals {";
    for (std::size_t i = 0; i < sys.machines.size(); ++i) {
        const auto& m = sys.machines[i];
        out << (i ? ", " : " ") << m.name << " : [";
        for (std::size_t j = 0; j < m.accepting.size(); ++j) out << (j ? ", " : "") << m.accepting[j];
        out << "]";
    }
    out << " }\n";
    return out.str();
}

Formula parse_ql(std::string_view text, const std::string& file) {
    Lexer lx(text, file);
    Formula f = QlParser(lx).implication();
    if (!lx.at_end()) lx.fail("unexpected " + Lexer::describe(lx.peek()) + " after the formula", lx.peek());
    return f;
}

std::string serialize_ql(const Formula& f) { return f.to_string() + "\n"; }

QGChor parse_qosgc(std::string_view text, const std::string& file) {
    Lexer lx(text, file);
    QGChor qg;
    if (lx.at("qos")) qg.attributes = parse_qos_env(lx);
    qg.body = GChorParser(lx, true, &qg.attributes).choice();
    if (!lx.at_end()) lx.fail("unexpected " + Lexer::describe(lx.peek()) + " after the g-choreography", lx.peek());
    return qg;
}

std::string serialize_qosgc(const QGChor& qg) {
    std::string out = "qos {";
    for (std::size_t i = 0; i < qg.attributes.size(); ++i)
        out += (i ? ", " : " ") + qg.attributes[i].name + " : " + qg.attributes[i].op;
    out += qg.attributes.empty() ? "}\n" : " }\n";
    return out + qg.body.to_string(true) + "\n";
}

GChor parse_gchor(std::string_view text, const std::string& file) {
    Lexer lx(text, file);
    GChor g = GChorParser(lx, false, nullptr).choice();
    if (!lx.at_end()) lx.fail("unexpected " + Lexer::describe(lx.peek()) + " after the g-choreography", lx.peek());
    return g;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file", SourceSpan{path, 0, 0, 0});
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace qcheck
