#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qcheck/aggregation.hpp"
#include "qcheck/gchor.hpp"
#include "qcheck/lts.hpp"
#include "qcheck/smt_backend.hpp"

namespace qcheck {

class Formula {
public:
    // True, Atomic, Not, Or and Until form the core; the rest desugar into it.
    enum class Kind { True, Atomic, Not, Or, Until, And, Implies, Possib, Nec };

    Formula();  // True

    static Formula truth();
    static Formula falsity();  // not true
    static Formula atomic(SmtTerm psi);
    static Formula negation(Formula f);
    static Formula disjunction(Formula a, Formula b);
    static Formula conjunction(Formula a, Formula b);
    static Formula implication(Formula a, Formula b);
    static Formula until(Formula a, GChor g, Formula b);
    static Formula possibly(GChor g, Formula f);
    static Formula necessarily(GChor g, Formula f);

    [[nodiscard]] Formula with_span(SourceSpan span) const;

    [[nodiscard]] Kind kind() const;
    [[nodiscard]] const SmtTerm& psi() const;
    [[nodiscard]] const Formula& left() const;   // also the operand of Not, Possib, Nec
    [[nodiscard]] const Formula& right() const;
    [[nodiscard]] const GChor& index() const;
    [[nodiscard]] const SourceSpan& span() const;

    [[nodiscard]] bool is_core() const;
    [[nodiscard]] std::size_t depth() const;
    // Surface syntax accepted by parse_ql.
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Formula& a, const Formula& b);
    friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

private:
    struct Node;
    explicit Formula(std::shared_ptr<const Node> n);
    std::shared_ptr<const Node> node_;
};

Formula desugar(const Formula& f);

struct Statistics {
    std::size_t runs = 0;
    std::size_t queries = 0;
    std::size_t cache_hits = 0;
};

struct Verdict {
    enum class Outcome { ModelFound, NoModelWithinBound, CounterexampleFound, NoCounterexampleWithinBound };

    Outcome outcome = Outcome::NoModelWithinBound;
    std::optional<Run> run;  // the model or counterexample
    Statistics stats;
    std::size_t bound = 0;
    unsigned unfoldings = 0;

    [[nodiscard]] bool found() const {
        return outcome == Outcome::ModelFound || outcome == Outcome::CounterexampleFound;
    }
};

// "sat", "no model found within bound k=K", ...
std::string verdict_line(const Verdict& v);

struct CheckerOptions {
    std::size_t bound = 0;
    std::optional<unsigned> unfoldings;  // defaults to the bound
    bool language_cache = true;
    bool entailment_cache = true;
    bool membership_cache = true;
    // Called after each run length has been explored, with the number of runs visited.
    std::function<void(std::size_t length, std::size_t runs)> on_length;

    void disable_caches() { language_cache = entailment_cache = membership_cache = false; }
};

class Checker {
public:
    Checker(const System& sys, SolverHandle& solver, CheckerOptions options = {});

    Verdict q_sat(const Formula& phi);
    Verdict q_valid(const Formula& phi);

    // `prefix` is |pi'|, `extension` is |pi''|; both measured in steps of `pi`.
    bool q_models(const Formula& phi, const Run& pi, std::size_t prefix);
    bool q_until(const Formula& phi1, const GChor& g, const Formula& phi2, const Run& pi, std::size_t prefix,
                 std::size_t extension);
    bool entails_at(const Run& pi, std::size_t prefix, const SmtTerm& psi);

    [[nodiscard]] const Statistics& stats() const { return stats_; }
    [[nodiscard]] unsigned unfoldings() const { return unfoldings_; }
    Lts& lts() { return lts_; }

private:
    struct LanguageEntry {
        std::shared_ptr<const Language> language;
        std::size_t id;
    };
    struct WordKey {
        std::size_t language;
        std::vector<ActionId> word;
        friend bool operator==(const WordKey&, const WordKey&) = default;
    };
    struct WordKeyHash {
        std::size_t operator()(const WordKey& k) const noexcept;
    };

    bool models(const Formula& core, const Path& pi, std::size_t prefix);
    bool until(const Formula& phi1, const GChor& g, const Formula& phi2, const Path& pi, std::size_t prefix,
               std::size_t extension);
    bool entails(const Path& pi, std::size_t prefix, const SmtTerm& psi);
    LanguageEntry language(const GChor& g);
    // Frontier state after reading pi[from, to).
    Language::State membership(const LanguageEntry& lang, const Path& pi, std::size_t from, std::size_t to,
                               const Language::State* previous);

    Lts lts_;
    SolverHandle& solver_;
    CheckerOptions options_;
    unsigned unfoldings_;
    Statistics stats_;

    std::unordered_map<std::string, LanguageEntry> languages_;
    std::size_t next_language_id_ = 0;
    std::map<std::string, bool> entailments_;
    std::unordered_map<WordKey, Language::State, WordKeyHash> memberships_;
};

}  // namespace qcheck
