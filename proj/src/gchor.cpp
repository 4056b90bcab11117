#include "qcheck/gchor.hpp"

#include <algorithm>
#include <functional>

namespace qcheck {

struct GChor::Node {
    Kind kind;
    std::string sender, receiver, message;
    InteractionQos qos;
    std::vector<GChor> kids;
    SourceSpan span;
};

GChor::GChor() : node_(std::make_shared<const Node>(Node{Kind::Empty, {}, {}, {}, {}, {}, {}})) {}
GChor::GChor(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

GChor GChor::interaction(std::string sender, std::string receiver, std::string message,
                         InteractionQos qos) {
    if (sender == receiver) throw GChorError("interaction " + sender + " -> " + receiver + " : " + message +
                                             " has equal sender and receiver");
    return GChor(std::make_shared<const Node>(Node{Kind::Interaction, std::move(sender), std::move(receiver),
                                                   std::move(message), std::move(qos), {}, {}}));
}

GChor GChor::seq(GChor a, GChor b) {
    return GChor(std::make_shared<const Node>(Node{Kind::Seq, {}, {}, {}, {}, {std::move(a), std::move(b)}, {}}));
}
GChor GChor::choice(GChor a, GChor b) {
    return GChor(
        std::make_shared<const Node>(Node{Kind::Choice, {}, {}, {}, {}, {std::move(a), std::move(b)}, {}}));
}
GChor GChor::par(GChor a, GChor b) {
    return GChor(std::make_shared<const Node>(Node{Kind::Par, {}, {}, {}, {}, {std::move(a), std::move(b)}, {}}));
}
GChor GChor::star(GChor body) {
    return GChor(std::make_shared<const Node>(Node{Kind::Star, {}, {}, {}, {}, {std::move(body)}, {}}));
}
GChor GChor::repeat1(GChor body) { return seq(body, star(body)); }
GChor GChor::brk() { return GChor(std::make_shared<const Node>(Node{Kind::Break, {}, {}, {}, {}, {}, {}})); }
GChor GChor::empty() { return GChor(); }

GChor GChor::with_span(SourceSpan span) const {
    Node n = *node_;
    n.span = std::move(span);
    return GChor(std::make_shared<const Node>(std::move(n)));
}

GChor::Kind GChor::kind() const { return node_->kind; }
const std::string& GChor::sender() const { return node_->sender; }
const std::string& GChor::receiver() const { return node_->receiver; }
const std::string& GChor::message() const { return node_->message; }
const InteractionQos& GChor::qos() const { return node_->qos; }
const GChor& GChor::left() const { return node_->kids.at(0); }
const GChor& GChor::right() const { return node_->kids.at(1); }
const GChor& GChor::body() const { return node_->kids.at(0); }
const SourceSpan& GChor::span() const { return node_->span; }

Action GChor::output() const { return {sender(), receiver(), ActionKind::Output, message()}; }
Action GChor::input() const { return {sender(), receiver(), ActionKind::Input, message()}; }

bool operator==(const GChor& a, const GChor& b) {
    if (a.node_ == b.node_) return true;
    return a.kind() == b.kind() && a.sender() == b.sender() && a.receiver() == b.receiver() &&
           a.message() == b.message() && a.qos() == b.qos() && a.node_->kids == b.node_->kids;
}

namespace {

int prec(GChor::Kind k) {
    switch (k) {
    case GChor::Kind::Choice:
        return 0;
    case GChor::Kind::Par:
        return 1;
    case GChor::Kind::Seq:
        return 2;
    default:
        return 3;
    }
}

std::string spec_text(const QosSpec& s) {
    std::string out;
    for (const auto& c : s.constraints) out += " " + c.to_string();
    return out.empty() ? " true" : out;
}

std::string render(const GChor& g, int min, bool with_qos) {
    std::string s;
    switch (g.kind()) {
    case GChor::Kind::Interaction: {
        s = g.sender() + " -> " + g.receiver() + " : " + g.message();
        const auto& q = g.qos();
        if (with_qos && !q.empty()) {
            std::vector<std::string> slots;
            if (q.sqos) slots.push_back("sqos:" + spec_text(*q.sqos));
            if (q.rqos) slots.push_back("rqos:" + spec_text(*q.rqos));
            if (q.sqos_post) slots.push_back("sqos':" + spec_text(*q.sqos_post));
            if (q.rqos_post) slots.push_back("rqos':" + spec_text(*q.rqos_post));
            s += " [";
            for (std::size_t i = 0; i < slots.size(); ++i) s += (i ? ", " : "") + slots[i];
            s += "]";
        }
        break;
    }
    case GChor::Kind::Seq:
        s = render(g.left(), 2, with_qos) + " ; " + render(g.right(), 3, with_qos);
        break;
    case GChor::Kind::Choice:
        s = render(g.left(), 0, with_qos) + " + " + render(g.right(), 1, with_qos);
        break;
    case GChor::Kind::Par:
        s = render(g.left(), 1, with_qos) + " | " + render(g.right(), 2, with_qos);
        break;
    case GChor::Kind::Star:
        s = "repeat { " + render(g.body(), 0, with_qos) + " }";
        break;
    case GChor::Kind::Break:
        s = "break";
        break;
    case GChor::Kind::Empty:
        s = "skip";
        break;
    }
    if (prec(g.kind()) < min) s = "{ " + s + " }";
    return s;
}

bool any_node(const GChor& g, const std::function<bool(const GChor&)>& p) {
    if (p(g)) return true;
    switch (g.kind()) {
    case GChor::Kind::Seq:
    case GChor::Kind::Choice:
    case GChor::Kind::Par:
        return any_node(g.left(), p) || any_node(g.right(), p);
    case GChor::Kind::Star:
        return any_node(g.body(), p);
    default:
        return false;
    }
}

// A break that would leave the loop enclosing g (not one nested inside g).
bool free_break(const GChor& g) {
    switch (g.kind()) {
    case GChor::Kind::Break:
        return true;
    case GChor::Kind::Seq:
    case GChor::Kind::Choice:
    case GChor::Kind::Par:
        return free_break(g.left()) || free_break(g.right());
    default:
        return false;
    }
}

using Opt = std::optional<GChor>;  // nullopt: no execution

Opt seq_opt(const Opt& a, const Opt& b) {
    if (!a || !b) return std::nullopt;
    if (a->kind() == GChor::Kind::Empty) return b;
    if (b->kind() == GChor::Kind::Empty) return a;
    return GChor::seq(*a, *b);
}

Opt choice_opt(const Opt& a, const Opt& b) {
    if (!a) return b;
    if (!b) return a;
    return GChor::choice(*a, *b);
}

GChor unfold_rec(const GChor& g, unsigned u);

// Executions of one loop iteration that do not break.
Opt continuing(const GChor& g, unsigned u) {
    switch (g.kind()) {
    case GChor::Kind::Break:
        return std::nullopt;
    case GChor::Kind::Interaction:
    case GChor::Kind::Empty:
        return g;
    case GChor::Kind::Seq:
        return seq_opt(continuing(g.left(), u), continuing(g.right(), u));
    case GChor::Kind::Choice:
        return choice_opt(continuing(g.left(), u), continuing(g.right(), u));
    case GChor::Kind::Par:
        if (free_break(g)) throw GChorError("break under parallel composition");
        return unfold_rec(g, u);
    case GChor::Kind::Star:
        return unfold_rec(g, u);
    }
    return std::nullopt;
}

// Executions of one loop iteration that end in a break.
Opt exiting(const GChor& g, unsigned u) {
    switch (g.kind()) {
    case GChor::Kind::Break:
        return GChor::empty();
    case GChor::Kind::Interaction:
    case GChor::Kind::Empty:
    case GChor::Kind::Star:  // a nested break only leaves the nested loop
        return std::nullopt;
    case GChor::Kind::Seq:
        return choice_opt(exiting(g.left(), u), seq_opt(continuing(g.left(), u), exiting(g.right(), u)));
    case GChor::Kind::Choice:
        return choice_opt(exiting(g.left(), u), exiting(g.right(), u));
    case GChor::Kind::Par:
        if (free_break(g)) throw GChorError("break under parallel composition");
        return std::nullopt;
    }
    return std::nullopt;
}

GChor unfold_rec(const GChor& g, unsigned u) {
    switch (g.kind()) {
    case GChor::Kind::Interaction:
    case GChor::Kind::Empty:
        return g;
    case GChor::Kind::Break:
        throw GChorError("break outside of a loop");
    case GChor::Kind::Seq:
        return GChor::seq(unfold_rec(g.left(), u), unfold_rec(g.right(), u));
    case GChor::Kind::Choice:
        return GChor::choice(unfold_rec(g.left(), u), unfold_rec(g.right(), u));
    case GChor::Kind::Par:
        return GChor::par(unfold_rec(g.left(), u), unfold_rec(g.right(), u));
    case GChor::Kind::Star: {
        const Opt c = continuing(g.body(), u);
        const Opt x = exiting(g.body(), u);
        Opt result = GChor::empty();
        Opt prefix = GChor::empty();  // c^(n-1)
        for (unsigned n = 1; n <= u && prefix; ++n) {
            result = choice_opt(result, seq_opt(prefix, c));
            result = choice_opt(result, seq_opt(prefix, x));
            prefix = seq_opt(prefix, c);
        }
        return *result;
    }
    }
    return g;
}

Pomset shifted(const Pomset& p, std::size_t offset, std::size_t total) {
    Pomset out;
    out.labels = p.labels;
    for (const auto& b : p.below) {
        boost::dynamic_bitset<> nb(total);
        for (auto i = b.find_first(); i != boost::dynamic_bitset<>::npos; i = b.find_next(i)) nb.set(i + offset);
        out.below.push_back(std::move(nb));
    }
    return out;
}

Pomset compose(const Pomset& a, const Pomset& b, bool sequential) {
    const std::size_t total = a.size() + b.size();
    Pomset out;
    out.labels = a.labels;
    out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
    for (const auto& x : a.below) {
        auto nb = x;
        nb.resize(total);
        out.below.push_back(std::move(nb));
    }
    Pomset sb = shifted(b, a.size(), total);
    for (std::size_t j = 0; j < b.size(); ++j) {
        auto nb = sb.below[j];
        if (sequential) {
            // events of `a` with the same subject as j or as one of j's predecessors in `b`
            auto add_from = [&](const std::string& subject) {
                for (std::size_t e = 0; e < a.size(); ++e) {
                    if (a.labels[e].subject() != subject) continue;
                    nb.set(e);
                    nb |= out.below[e];
                }
            };
            add_from(b.labels[j].subject());
            for (auto i = b.below[j].find_first(); i != boost::dynamic_bitset<>::npos; i = b.below[j].find_next(i))
                add_from(b.labels[i].subject());
        }
        out.below.push_back(std::move(nb));
    }
    return out;
}

std::vector<Pomset> pomsets_rec(const GChor& g) {
    switch (g.kind()) {
    case GChor::Kind::Empty:
        return {Pomset{}};
    case GChor::Kind::Interaction: {
        Pomset p;
        p.labels = {g.output(), g.input()};
        p.below = {boost::dynamic_bitset<>(2), boost::dynamic_bitset<>(2)};
        p.below[1].set(0);
        return {p};
    }
    case GChor::Kind::Choice: {
        auto l = pomsets_rec(g.left());
        auto r = pomsets_rec(g.right());
        l.insert(l.end(), r.begin(), r.end());
        return l;
    }
    case GChor::Kind::Seq:
    case GChor::Kind::Par: {
        auto l = pomsets_rec(g.left());
        auto r = pomsets_rec(g.right());
        std::vector<Pomset> out;
        out.reserve(l.size() * r.size());
        for (const auto& a : l)
            for (const auto& b : r) out.push_back(compose(a, b, g.kind() == GChor::Kind::Seq));
        return out;
    }
    case GChor::Kind::Star:
        throw GChorError("pomsets of a g-choreography with loops: unfold it first");
    case GChor::Kind::Break:
        throw GChorError("break outside of a loop");
    }
    return {};
}

}  // namespace

std::string GChor::to_string(bool with_qos) const { return render(*this, 0, with_qos); }

bool contains_star(const GChor& g) {
    return any_node(g, [](const GChor& x) { return x.kind() == GChor::Kind::Star; });
}
bool contains_break(const GChor& g) {
    return any_node(g, [](const GChor& x) { return x.kind() == GChor::Kind::Break; });
}
bool contains_par(const GChor& g) {
    return any_node(g, [](const GChor& x) { return x.kind() == GChor::Kind::Par; });
}

std::size_t interaction_count(const GChor& g) {
    switch (g.kind()) {
    case GChor::Kind::Interaction:
        return 1;
    case GChor::Kind::Seq:
    case GChor::Kind::Choice:
    case GChor::Kind::Par:
        return interaction_count(g.left()) + interaction_count(g.right());
    case GChor::Kind::Star:
        return interaction_count(g.body());
    default:
        return 0;
    }
}

GChor unfold(const GChor& g, unsigned u) { return unfold_rec(g, u); }

std::vector<Pomset> pomsets_of(const GChor& g) { return pomsets_rec(g); }

Language::Language(const GChor& g, unsigned u) : pomsets_(pomsets_of(unfold(g, u))) {}

Language::State Language::start() const {
    State s;
    s.reserve(pomsets_.size());
    for (std::uint32_t i = 0; i < pomsets_.size(); ++i)
        s.emplace_back(i, boost::dynamic_bitset<>(pomsets_[i].size()));
    return s;
}

Language::State Language::advance(const State& s, const Action& a) const {
    State out;
    for (const auto& [pi, done] : s) {
        const Pomset& p = pomsets_[pi];
        for (std::size_t e = 0; e < p.size(); ++e) {
            if (done.test(e) || p.labels[e] != a) continue;
            if (!p.below[e].is_subset_of(done)) continue;
            auto next = done;
            next.set(e);
            out.emplace_back(pi, std::move(next));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool Language::complete(const State& s) const {
    return std::any_of(s.begin(), s.end(), [](const Frontier& f) { return f.second.all(); });
}

bool Language::contains(const Word& w) const {
    State s = start();
    for (const auto& a : w) {
        s = advance(s, a);
        if (s.empty()) return false;
    }
    return true;
}

bool Language::maximal(const Word& w) const {
    State s = start();
    for (const auto& a : w) {
        s = advance(s, a);
        if (s.empty()) return false;
    }
    return complete(s);
}

bool word_in_language(const GChor& g, unsigned u, const Word& w) { return Language(g, u).contains(w); }
bool word_maximal(const GChor& g, unsigned u, const Word& w) { return Language(g, u).maximal(w); }

}  // namespace qcheck
