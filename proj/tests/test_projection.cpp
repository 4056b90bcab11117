#include <doctest.h>

#include "oracle.hpp"
#include "qcheck/generator.hpp"
#include "qcheck/lts.hpp"
#include "qcheck/projection.hpp"
#include "testutil.hpp"

using namespace qcheck;
using testutil::out;

namespace {

QosSpec spec(const std::string& c) { return QosSpec{{parse_smt_term(c)}}; }

std::set<Word> terminal_traces(const System& sys, std::size_t k) {
    std::set<Word> out;
    Lts lts(sys);
    for (std::size_t n = 0; n <= k; ++n)
        lts.for_each_path(n, [&](const Path& p) {
            if (lts.successors(p.configs.back()).empty()) {
                CHECK(lts.accepting(p.configs.back()));
                out.insert(trace_of(lts.to_run(p)));
            }
            return true;
        });
    return out;
}

}  // namespace

TEST_CASE("single annotated interaction") {
    InteractionQos q;
    q.sqos = spec("(<= cost 1)");
    q.rqos_post = spec("(= cost 2)");
    const System sys = project(QGChor{{{"cost", "+"}}, GChor::interaction("A", "B", "m", q)});
    CHECK(validate_system(sys).empty());
    REQUIRE(sys.machines.size() == 2);
    const Machine& a = sys.machines[0];
    const Machine& b = sys.machines[1];
    CHECK(a.states.size() == 2);
    CHECK(b.states.size() == 2);
    REQUIRE(a.transitions.size() == 1);
    CHECK(a.transitions[0].action == out("A", "B", "m"));
    REQUIRE(a.spec(a.initial) != nullptr);
    CHECK(*a.spec(a.initial) == *q.sqos);
    CHECK(a.spec(a.transitions[0].target) == nullptr);
    REQUIRE(b.transitions.size() == 1);
    CHECK(b.spec(b.initial) == nullptr);
    REQUIRE(b.spec(b.transitions[0].target) != nullptr);
    CHECK(*b.spec(b.transitions[0].target) == *q.rqos_post);
    CHECK(a.accepting == std::vector<std::string>{a.transitions[0].target});
}

TEST_CASE("same-sender sequence gives a chain") {
    const GChor g = GChor::seq(GChor::interaction("A", "B", "m"), GChor::interaction("A", "B", "n"));
    const System sys = project(QGChor{{}, g});
    const Machine& a = sys.machines[0];
    CHECK(a.states == std::vector<std::string>{"0", "1", "2"});
    REQUIRE(a.transitions.size() == 2);
    CHECK(a.transitions[0].source == "0");
    CHECK(a.transitions[0].target == "1");
    CHECK(a.transitions[1].source == "1");
    CHECK(a.transitions[1].target == "2");
    CHECK(a.accepting == std::vector<std::string>{"2"});
}

TEST_CASE("loops and choices") {
    const GChor g = parse_gchor("A -> B : x ; repeat { A -> B : y + A -> B : z ; break } ; B -> A : w");
    const System sys = project(QGChor{{}, g});
    CHECK(validate_system(sys).empty());
    const Machine& a = sys.machines[0];
    // subsets are not minimised: after x and after y are distinct states with the same moves
    CHECK(a.states.size() == 5);
    CHECK(a.transitions.size() == 8);
    CHECK(a.accepting == std::vector<std::string>{"4"});
}

TEST_CASE("projection errors") {
    const GChor par = GChor::par(GChor::interaction("A", "B", "m"), GChor::interaction("B", "A", "n"));
    CHECK_THROWS_WITH_AS(project(QGChor{{}, par}), "parallel not projectable", ProjectionError);
    InteractionQos q1, q2;
    q1.sqos_post = spec("(<= cost 1)");
    q2.sqos = spec("(<= cost 2)");
    const GChor clash = GChor::seq(GChor::interaction("A", "B", "m", q1), GChor::interaction("A", "B", "n", q2));
    CHECK_THROWS_AS(project(QGChor{{{"cost", "+"}}, clash}), ProjectionError);
    // the same spec twice on one state is no collision
    const GChor same = GChor::seq(GChor::interaction("A", "B", "m", q1), GChor::interaction("A", "B", "n", InteractionQos{q1.sqos_post, {}, {}, {}}));
    CHECK_NOTHROW(project(QGChor{{{"cost", "+"}}, same}));
}

TEST_CASE("nested choices project soundly") {
    for (unsigned n = 1; n <= 3; ++n) {
        const NestedChoices nc = gen_nested_choices(n, 42 + n);
        const QGChor qg = parse_qosgc(nc.qosgc);
        const System sys = project(qg);
        CHECK(sys == project(qg));
        REQUIRE(sys.machines.size() == 2);
        CHECK(sys.machines[0].name == "Bob");
        const auto traces = terminal_traces(sys, 2 * (n + 1));
        CHECK(traces.size() == (std::size_t{1} << n));
        CHECK(traces == oracle::complete_words(qg.body, 0));
        std::set<std::string> leaves;
        for (const auto& w : traces) leaves.insert(w.back().message);
        CHECK(leaves.size() == traces.size());
    }
}

TEST_CASE("nested choices n=2 matches the figure") {
    const NestedChoices nc = gen_nested_choices(2, 1);
    const QGChor qg = parse_qosgc(nc.qosgc);
    CHECK(qg.body.kind() == GChor::Kind::Choice);
    CHECK(qg.body.left().kind() == GChor::Kind::Seq);
    CHECK(qg.body.left().left() == GChor::interaction("Bob", "Alice", "m0"));
    CHECK(qg.body.left().right().kind() == GChor::Kind::Choice);
    CHECK(interaction_count(qg.body) == 10);
    CHECK(qg.attributes.size() == 5);
}
