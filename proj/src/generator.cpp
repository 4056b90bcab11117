#include "qcheck/generator.hpp"

#include <random>
#include <set>
#include <stdexcept>

#include "qcheck/frontends.hpp"

namespace qcheck {

namespace {

struct Builder {
    unsigned depth;
    const std::vector<std::array<long, 5>>& values;
    std::size_t next_leaf = 0;
    bool annotate = true;

    static const char* sender(unsigned turn) { return turn % 2 == 1 ? "Bob" : "Alice"; }
    static const char* receiver(unsigned turn) { return turn % 2 == 1 ? "Alice" : "Bob"; }

    GChor leaf(unsigned turn) {
        const std::size_t i = next_leaf++;
        InteractionQos q;
        if (annotate) {
            QosSpec spec;
            for (std::size_t a = 0; a < kNestedAttributes.size(); ++a)
                spec.constraints.push_back(SmtTerm::app(
                    "=", {SmtTerm::var(kNestedAttributes[a]), SmtTerm::real(std::to_string(values[i][a]))}));
            q.rqos_post = spec;
        }
        return GChor::interaction(sender(turn), receiver(turn), "leaf" + std::to_string(i + 1), q);
    }

    GChor turn(unsigned t) {
        if (t > depth) return leaf(t);
        GChor first = GChor::seq(GChor::interaction(sender(t), receiver(t), "m0"), turn(t + 1));
        GChor second = GChor::seq(GChor::interaction(sender(t), receiver(t), "m1"), turn(t + 1));
        return GChor::choice(first, second);
    }
};

}  // namespace

NestedChoices gen_nested_choices(unsigned n, std::uint64_t seed) {
    if (n < 1 || n > 16) throw std::invalid_argument("nesting depth must be between 1 and 16");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> value(0, 999);
    const std::size_t leaves = std::size_t{1} << n;

    NestedChoices out;
    out.depth = n;
    std::set<std::array<long, 5>> used;
    while (out.leaf_values.size() < leaves) {
        std::array<long, 5> v{};
        for (auto& x : v) x = value(rng);
        if (used.insert(v).second) out.leaf_values.push_back(v);
    }
    out.chosen_leaf = std::uniform_int_distribution<std::size_t>(1, leaves)(rng);

    QGChor qg;
    for (const char* a : kNestedAttributes) qg.attributes.push_back({a, "+"});
    Builder annotated{n, out.leaf_values};
    qg.body = annotated.turn(1);
    out.qosgc = serialize_qosgc(qg);

    Builder plain{n, out.leaf_values};
    plain.annotate = false;
    std::vector<SmtTerm> pins;
    for (std::size_t a = 0; a < kNestedAttributes.size(); ++a)
        pins.push_back(SmtTerm::app("=", {SmtTerm::var(kNestedAttributes[a]),
                                          SmtTerm::real(std::to_string(out.leaf_values[out.chosen_leaf - 1][a]))}));
    Formula f = Formula::until(Formula::truth(), plain.turn(1), Formula::atomic(SmtTerm::app("and", pins)));
    out.ql = "-- satisfied only by the run through leaf" + std::to_string(out.chosen_leaf) + "\n" + serialize_ql(f);
    return out;
}

}  // namespace qcheck
