#include <doctest.h>

#include <random>

#include "oracle.hpp"
#include "qcheck/lts.hpp"
#include "qcheck/ql.hpp"
#include "testutil.hpp"

using namespace qcheck;
using testutil::in;
using testutil::load_formula;
using testutil::load_system;
using testutil::out;

namespace {

Formula atom(const std::string& s) { return Formula::atomic(parse_smt_term(s)); }

Verdict sat(const System& sys, const Formula& f, std::size_t k, bool caches = true, std::optional<unsigned> u = {}) {
    CheckerOptions o;
    o.bound = k;
    o.unfoldings = u;
    if (!caches) o.disable_caches();
    Checker c(sys, testutil::solver(), o);
    return c.q_sat(f);
}

Verdict valid(const System& sys, const Formula& f, std::size_t k) {
    CheckerOptions o;
    o.bound = k;
    Checker c(sys, testutil::solver(), o);
    return c.q_valid(f);
}

// Example 1 with A's cost pinned to an interval, so the box oracle can evaluate it
System example1_intervals() {
    System sys = load_system("example1.qosfsa");
    auto& spec = sys.machines[0].specs.at("1").constraints;
    spec.back() = parse_smt_term("(and (<= 1 cost) (<= cost 2))");
    return sys;
}

}  // namespace

TEST_CASE("desugaring") {
    const GChor g = GChor::interaction("A", "B", "m");
    const Formula p = atom("(<= cost 1)");
    const Formula q = atom("(<= mem 2)");
    CHECK(desugar(Formula::possibly(g, p)) == Formula::until(Formula::truth(), g, p));
    CHECK(desugar(Formula::necessarily(g, p)) ==
          Formula::negation(Formula::until(Formula::truth(), g, Formula::negation(p))));
    CHECK(desugar(Formula::implication(p, q)) == Formula::disjunction(Formula::negation(p), q));
    CHECK(desugar(Formula::conjunction(p, q)) ==
          Formula::negation(Formula::disjunction(Formula::negation(p), Formula::negation(q))));
    CHECK(desugar(Formula::necessarily(g, Formula::possibly(g, p))).is_core());
    CHECK_FALSE(Formula::possibly(g, p).is_core());
    CHECK(Formula::falsity() == Formula::negation(Formula::truth()));
}

TEST_CASE("acceptance guard on example 1") {
    const System sys = load_system("example1.qosfsa");
    const Verdict v0 = sat(sys, Formula::truth(), 0);
    CHECK(v0.outcome == Verdict::Outcome::NoModelWithinBound);
    CHECK(verdict_line(v0) == "no model found within bound k=0");
    CHECK_FALSE(v0.run.has_value());
    CHECK(sat(sys, Formula::truth(), 5).outcome == Verdict::Outcome::NoModelWithinBound);
    const Verdict v6 = sat(sys, Formula::truth(), 6);
    REQUIRE(v6.outcome == Verdict::Outcome::ModelFound);
    CHECK(verdict_line(v6) == "sat");
    CHECK(trace_of(*v6.run) == Word{out("A", "B", "x"), in("A", "B", "x"), out("B", "A", "y"), in("B", "A", "y"),
                                    out("A", "B", "z2"), in("A", "B", "z2")});
    CHECK(is_accepting(sys, v6.run->last()));
}

TEST_CASE("verdict lines") {
    const System sys = load_system("example1.qosfsa");
    const Verdict nv = valid(sys, Formula::truth(), 7);
    CHECK(verdict_line(nv) == "no counterexample found within bound k=7");
    const Verdict cv = valid(sys, Formula::falsity(), 7);
    CHECK(verdict_line(cv) == "counterexample found");
    CHECK(cv.run->length() == 6);
}

TEST_CASE("q_models base cases") {
    const System sys = load_system("example1.qosfsa");
    CheckerOptions o;
    o.bound = 6;
    Checker c(sys, testutil::solver(), o);
    const Run pi = *sat(sys, Formula::truth(), 6).run;
    for (std::size_t n = 0; n <= pi.length(); ++n) {
        CHECK(c.q_models(Formula::truth(), pi, n));
        CHECK_FALSE(c.q_models(Formula::falsity(), pi, n));
    }
    // true U_G true holds at once when the empty word is complete
    CHECK(c.q_until(Formula::truth(), GChor::empty(), Formula::truth(), pi, 0, 0));
    CHECK(c.q_until(Formula::truth(), GChor::star(GChor::interaction("A", "B", "x")), Formula::truth(), pi, 0, 0));
    // phi1 false, extension needed
    CHECK_FALSE(c.q_until(Formula::falsity(), GChor::interaction("A", "B", "x"), Formula::truth(), pi, 0, 0));
    CHECK(c.q_until(Formula::truth(), GChor::interaction("A", "B", "x"), Formula::truth(), pi, 0, 0));
    // on the completed run A@1 and B@3 have fired: cost = 0.2 mem + 1 with mem in [5, 10]
    CHECK(c.entails_at(pi, 6, parse_smt_term("(<= 2 cost)")));
    CHECK_FALSE(c.entails_at(pi, 6, parse_smt_term("(<= 2.5 cost)")));
    CHECK(c.q_models(Formula::disjunction(Formula::truth(), atom("(<= cost 0)")), pi, 0));
    CHECK_THROWS_AS(c.q_models(Formula::truth(), pi, 7), std::invalid_argument);
}

TEST_CASE("example 3 property") {
    const System sys = load_system("example1.qosfsa");
    const Formula phi = load_formula("example3.ql");
    // A@1 gives cost = 0.2 mem with mem >= 5 at every occurrence and B@3 never fires inside the indices,
    // so cost = 0.2 mem <= 10 mem on every completion: no counterexample, and any accepting run is a model
    const Verdict s = sat(sys, phi, 6);
    CHECK(s.outcome == Verdict::Outcome::ModelFound);
    CHECK(valid(sys, phi, 24).outcome == Verdict::Outcome::NoCounterexampleWithinBound);
}

TEST_CASE("example 3 property matches the reference evaluator") {
    const System sys = example1_intervals();
    const Formula phi = load_formula("example3.ql");
    const Formula neg = Formula::negation(phi);
    for (std::size_t k : {6, 18, 22}) {
        for (const auto& f : {phi, neg}) {
            const bool expected = oracle::satisfiable(sys, f, k, static_cast<unsigned>(k)).has_value();
            CHECK(sat(sys, f, k).found() == expected);
        }
    }
    // tighter bound on cost flips the inner atom
    const Formula tight = parse_ql(
        "[ A -> B : x ; B -> A : y ; A -> B : z1 ; B -> A : y ] qos (<= cost 3)");
    const bool expected = oracle::satisfiable(sys, Formula::negation(tight), 14, 14).has_value();
    CHECK(expected);
    CHECK(sat(sys, Formula::negation(tight), 14).found() == expected);
}

TEST_CASE("bound monotonicity and cache transparency") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 25; ++i) {
        const System sys = oracle::random_system(rng);
        const Formula f = oracle::random_formula(rng, sys, 2);
        const std::size_t k = 2 + i % 5;
        const Verdict a = sat(sys, f, k);
        const Verdict b = sat(sys, f, k + 1);
        const Verdict off = sat(sys, f, k, false);
        CHECK(off.found() == a.found());
        CHECK(off.run == a.run);
        CHECK(off.stats.cache_hits == 0);
        if (a.found()) {
            CHECK(b.found());
            // first model in canonical order does not move
            CHECK(b.run == a.run);
        }
        // surface and desugared formulas agree
        CHECK(sat(sys, desugar(f), k).run == a.run);
    }
}

TEST_CASE("unfolding bound defaults to k") {
    const System sys = load_system("example1.qosfsa");
    CheckerOptions o;
    o.bound = 9;
    Checker c(sys, testutil::solver(), o);
    CHECK(c.unfoldings() == 9);
    o.unfoldings = 2;
    Checker d(sys, testutil::solver(), o);
    CHECK(d.unfoldings() == 2);
    // with u = 0 the loop in the index cannot absorb z1 ; y
    const Formula f = parse_ql("< A -> B : x ; B -> A : y ; repeat { A -> B : z1 ; B -> A : y } ; A -> B : z2 > true");
    CHECK(sat(sys, f, 10, true, 0u).outcome == Verdict::Outcome::ModelFound);
    const Formula g = parse_ql(
        "< A -> B : x ; B -> A : y ; repeat { A -> B : z1 ; B -> A : y } ; A -> B : z2 > true and not < A -> B : x ; B -> A : y ; A -> B : z2 > true");
    CHECK(sat(sys, g, 10, true, 0u).outcome == Verdict::Outcome::NoModelWithinBound);
    CHECK(sat(sys, g, 10, true, 1u).outcome == Verdict::Outcome::ModelFound);
}
