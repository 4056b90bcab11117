#include "qcheck/ql.hpp"

#include <algorithm>

namespace qcheck {

struct Formula::Node {
    Kind kind;
    SmtTerm psi;
    std::vector<Formula> kids;
    std::optional<GChor> index;
    SourceSpan span;
};

Formula::Formula() : node_(std::make_shared<const Node>(Node{Kind::True, {}, {}, {}, {}})) {}
Formula::Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

Formula Formula::truth() { return Formula(); }
Formula Formula::falsity() { return negation(truth()); }
Formula Formula::atomic(SmtTerm psi) {
    if (sort_of(psi) != Sort::Bool) throw SmtError("atomic formula is not boolean: " + psi.to_string(), 0);
    return Formula(std::make_shared<const Node>(Node{Kind::Atomic, std::move(psi), {}, {}, {}}));
}
Formula Formula::negation(Formula f) {
    return Formula(std::make_shared<const Node>(Node{Kind::Not, {}, {std::move(f)}, {}, {}}));
}
Formula Formula::disjunction(Formula a, Formula b) {
    return Formula(std::make_shared<const Node>(Node{Kind::Or, {}, {std::move(a), std::move(b)}, {}, {}}));
}
Formula Formula::conjunction(Formula a, Formula b) {
    return Formula(std::make_shared<const Node>(Node{Kind::And, {}, {std::move(a), std::move(b)}, {}, {}}));
}
Formula Formula::implication(Formula a, Formula b) {
    return Formula(std::make_shared<const Node>(Node{Kind::Implies, {}, {std::move(a), std::move(b)}, {}, {}}));
}
Formula Formula::until(Formula a, GChor g, Formula b) {
    return Formula(
        std::make_shared<const Node>(Node{Kind::Until, {}, {std::move(a), std::move(b)}, std::move(g), {}}));
}
Formula Formula::possibly(GChor g, Formula f) {
    return Formula(std::make_shared<const Node>(Node{Kind::Possib, {}, {std::move(f)}, std::move(g), {}}));
}
Formula Formula::necessarily(GChor g, Formula f) {
    return Formula(std::make_shared<const Node>(Node{Kind::Nec, {}, {std::move(f)}, std::move(g), {}}));
}

Formula Formula::with_span(SourceSpan span) const {
    Node n = *node_;
    n.span = std::move(span);
    return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula::Kind Formula::kind() const { return node_->kind; }
const SmtTerm& Formula::psi() const { return node_->psi; }
const Formula& Formula::left() const { return node_->kids.at(0); }
const Formula& Formula::right() const { return node_->kids.at(1); }
const GChor& Formula::index() const { return node_->index.value(); }
const SourceSpan& Formula::span() const { return node_->span; }

bool Formula::is_core() const {
    switch (kind()) {
    case Kind::True:
    case Kind::Atomic:
        return true;
    case Kind::Not:
        return left().is_core();
    case Kind::Or:
    case Kind::Until:
        return left().is_core() && right().is_core();
    default:
        return false;
    }
}

std::size_t Formula::depth() const {
    std::size_t d = 0;
    for (const auto& k : node_->kids) d = std::max(d, k.depth());
    return node_->kids.empty() ? 0 : d + 1;
}

bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    return a.kind() == b.kind() && a.psi() == b.psi() && a.node_->index == b.node_->index &&
           a.node_->kids == b.node_->kids;
}

namespace {

int prec(Formula::Kind k) {
    switch (k) {
    case Formula::Kind::Implies:
        return 0;
    case Formula::Kind::Until:
        return 1;
    case Formula::Kind::Or:
        return 2;
    case Formula::Kind::And:
        return 3;
    case Formula::Kind::Not:
    case Formula::Kind::Possib:
    case Formula::Kind::Nec:
        return 4;
    default:
        return 5;
    }
}

std::string render(const Formula& f, int min) {
    using K = Formula::Kind;
    std::string s;
    switch (f.kind()) {
    case K::True:
        s = "true";
        break;
    case K::Atomic:
        s = "qos " + f.psi().to_string();
        break;
    case K::Not:
        s = "not " + render(f.left(), 4);
        break;
    case K::Or:
        s = render(f.left(), 2) + " or " + render(f.right(), 3);
        break;
    case K::And:
        s = render(f.left(), 3) + " and " + render(f.right(), 4);
        break;
    case K::Implies:
        s = render(f.left(), 1) + " => " + render(f.right(), 0);
        break;
    case K::Until:
        s = render(f.left(), 2) + " until { " + f.index().to_string() + " } " + render(f.right(), 1);
        break;
    case K::Possib:
        s = "< " + f.index().to_string() + " > " + render(f.left(), 4);
        break;
    case K::Nec:
        s = "[ " + f.index().to_string() + " ] " + render(f.left(), 4);
        break;
    }
    if (prec(f.kind()) < min) s = "(" + s + ")";
    return s;
}

}  // namespace

std::string Formula::to_string() const { return render(*this, 0); }

Formula desugar(const Formula& f) {
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::True:
    case K::Atomic:
        return f;
    case K::Not:
        return Formula::negation(desugar(f.left()));
    case K::Or:
        return Formula::disjunction(desugar(f.left()), desugar(f.right()));
    case K::And:
        return Formula::negation(
            Formula::disjunction(Formula::negation(desugar(f.left())), Formula::negation(desugar(f.right()))));
    case K::Implies:
        return Formula::disjunction(Formula::negation(desugar(f.left())), desugar(f.right()));
    case K::Until:
        return Formula::until(desugar(f.left()), f.index(), desugar(f.right()));
    case K::Possib:
        return Formula::until(Formula::truth(), f.index(), desugar(f.left()));
    case K::Nec:
        return Formula::negation(
            Formula::until(Formula::truth(), f.index(), Formula::negation(desugar(f.left()))));
    }
    return f;
}

std::string verdict_line(const Verdict& v) {
    const std::string k = std::to_string(v.bound);
    switch (v.outcome) {
    case Verdict::Outcome::ModelFound:
        return "sat";
    case Verdict::Outcome::NoModelWithinBound:
        return "no model found within bound k=" + k;
    case Verdict::Outcome::CounterexampleFound:
        return "counterexample found";
    case Verdict::Outcome::NoCounterexampleWithinBound:
        return "no counterexample found within bound k=" + k;
    }
    return "";
}

std::size_t Checker::WordKeyHash::operator()(const WordKey& k) const noexcept {
    std::size_t h = k.language * 0x9e3779b97f4a7c15ULL;
    for (auto a : k.word) h ^= a + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

Checker::Checker(const System& sys, SolverHandle& solver, CheckerOptions options)
    : lts_(sys),
      solver_(solver),
      options_(std::move(options)),
      unfoldings_(options_.unfoldings.value_or(static_cast<unsigned>(options_.bound))) {}

Verdict Checker::q_sat(const Formula& phi) {
    const Formula core = desugar(phi);
    stats_ = {};
    Verdict v;
    v.bound = options_.bound;
    v.unfoldings = unfoldings_;
    std::optional<Path> witness;
    for (std::size_t i = 0; i <= options_.bound && !witness; ++i) {
        std::size_t count = 0;
        lts_.for_each_path(i, [&](const Path& p) {
            ++stats_.runs;
            ++count;
            if (lts_.accepting(p.configs.back()) && models(core, p, 0)) {
                witness = p;
                return false;
            }
            return true;
        });
        if (options_.on_length) options_.on_length(i, count);
    }
    if (witness) {
        v.outcome = Verdict::Outcome::ModelFound;
        v.run = lts_.to_run(*witness);
    }
    v.stats = stats_;
    return v;
}

Verdict Checker::q_valid(const Formula& phi) {
    Verdict v = q_sat(Formula::negation(phi));
    v.outcome = v.found() ? Verdict::Outcome::CounterexampleFound : Verdict::Outcome::NoCounterexampleWithinBound;
    return v;
}

bool Checker::q_models(const Formula& phi, const Run& pi, std::size_t prefix) {
    Path p = lts_.to_path(pi);
    if (prefix > p.length()) throw std::invalid_argument("prefix longer than the run");
    return models(phi.is_core() ? phi : desugar(phi), p, prefix);
}

bool Checker::q_until(const Formula& phi1, const GChor& g, const Formula& phi2, const Run& pi, std::size_t prefix,
                      std::size_t extension) {
    Path p = lts_.to_path(pi);
    if (prefix + extension > p.length()) throw std::invalid_argument("extension beyond the run");
    return until(desugar(phi1), g, desugar(phi2), p, prefix, extension);
}

bool Checker::entails_at(const Run& pi, std::size_t prefix, const SmtTerm& psi) {
    Path p = lts_.to_path(pi);
    if (prefix > p.length()) throw std::invalid_argument("prefix longer than the run");
    return entails(p, prefix, psi);
}

bool Checker::models(const Formula& f, const Path& pi, std::size_t prefix) {
    switch (f.kind()) {
    case Formula::Kind::True:
        return true;
    case Formula::Kind::Atomic:
        return entails(pi, prefix, f.psi());
    case Formula::Kind::Not:
        return !models(f.left(), pi, prefix);
    case Formula::Kind::Or:
        return models(f.left(), pi, prefix) || models(f.right(), pi, prefix);
    case Formula::Kind::Until:
        return until(f.left(), f.index(), f.right(), pi, prefix, 0);
    default:
        throw std::logic_error("formula is not desugared: " + f.to_string());
    }
}

bool Checker::until(const Formula& phi1, const GChor& g, const Formula& phi2, const Path& pi, std::size_t prefix,
                    std::size_t extension) {
    const LanguageEntry lang = language(g);
    std::size_t e = extension;
    Language::State state = membership(lang, pi, prefix, prefix + e, nullptr);
    for (;;) {
        const std::size_t here = prefix + e;
        if (lang.language->complete(state) && models(phi2, pi, here)) return true;
        if (!models(phi1, pi, here)) return false;
        if (here == pi.length()) return false;
        Language::State next = membership(lang, pi, prefix, here + 1, &state);
        if (!Language::alive(next)) return false;
        state = std::move(next);
        ++e;
    }
}

bool Checker::entails(const Path& pi, std::size_t prefix, const SmtTerm& psi) {
    const System& sys = lts_.system();
    const SmtScript script = build_entailment_query(sys, occurrences(lts_, pi, prefix), psi);
    std::string key = serialize(script);
    if (options_.entailment_cache) {
        auto it = entailments_.find(key);
        if (it != entailments_.end()) {
            ++stats_.cache_hits;
            return it->second;
        }
    }
    ++stats_.queries;
    const bool verdict = decide_entailment(solver_.check_sat(key));
    if (options_.entailment_cache) entailments_.emplace(std::move(key), verdict);
    return verdict;
}

Checker::LanguageEntry Checker::language(const GChor& g) {
    if (!options_.language_cache) return {std::make_shared<const Language>(g, unfoldings_), next_language_id_++};
    std::string key = g.to_string();
    auto it = languages_.find(key);
    if (it != languages_.end()) {
        ++stats_.cache_hits;
        return it->second;
    }
    LanguageEntry entry{std::make_shared<const Language>(g, unfoldings_), next_language_id_++};
    languages_.emplace(std::move(key), entry);
    return entry;
}

Language::State Checker::membership(const LanguageEntry& lang, const Path& pi, std::size_t from, std::size_t to,
                                    const Language::State* previous) {
    auto from_scratch = [&] {
        Language::State s = lang.language->start();
        for (std::size_t i = from; i < to && Language::alive(s); ++i) s = lang.language->advance(s, lts_.action(pi.actions[i]));
        return s;
    };
    if (!options_.membership_cache) return from_scratch();
    WordKey key{lang.id, std::vector<ActionId>(pi.actions.begin() + static_cast<std::ptrdiff_t>(from),
                                               pi.actions.begin() + static_cast<std::ptrdiff_t>(to))};
    auto it = memberships_.find(key);
    if (it != memberships_.end()) {
        ++stats_.cache_hits;
        return it->second;
    }
    Language::State s = (previous != nullptr && to > from)
                            ? lang.language->advance(*previous, lts_.action(pi.actions[to - 1]))
                            : from_scratch();
    memberships_.emplace(std::move(key), s);
    return s;
}

}  // namespace qcheck
