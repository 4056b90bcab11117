#include "qcheck/projection.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace qcheck {

namespace {

struct Nfa {
    struct Edge {
        int from;
        std::optional<Action> label;  // nullopt: epsilon
        int to;
    };
    int states = 2;  // 0 start, 1 end
    std::vector<Edge> edges;
    std::map<int, std::vector<QosSpec>> specs;

    int fresh() { return states++; }
    void eps(int a, int b) { edges.push_back({a, std::nullopt, b}); }
};

void collect_participants(const GChor& g, std::vector<std::string>& out) {
    auto add = [&](const std::string& p) {
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    };
    switch (g.kind()) {
    case GChor::Kind::Interaction:
        add(g.sender());
        add(g.receiver());
        return;
    case GChor::Kind::Seq:
    case GChor::Kind::Choice:
    case GChor::Kind::Par:
        collect_participants(g.left(), out);
        collect_participants(g.right(), out);
        return;
    case GChor::Kind::Star:
        collect_participants(g.body(), out);
        return;
    default:
        return;
    }
}

void build(Nfa& n, const GChor& g, const std::string& p, int from, int to, int exit) {
    switch (g.kind()) {
    case GChor::Kind::Interaction: {
        const bool sends = g.sender() == p;
        const bool receives = g.receiver() == p;
        if (!sends && !receives) {
            n.eps(from, to);
            return;
        }
        const int pre = n.fresh();
        const int post = n.fresh();
        n.eps(from, pre);
        n.edges.push_back({pre, sends ? g.output() : g.input(), post});
        n.eps(post, to);
        const auto& q = g.qos();
        const auto& before = sends ? q.sqos : q.rqos;
        const auto& after = sends ? q.sqos_post : q.rqos_post;
        if (before) n.specs[pre].push_back(*before);
        if (after) n.specs[post].push_back(*after);
        return;
    }
    case GChor::Kind::Seq: {
        const int mid = n.fresh();
        build(n, g.left(), p, from, mid, exit);
        build(n, g.right(), p, mid, to, exit);
        return;
    }
    case GChor::Kind::Choice:
        build(n, g.left(), p, from, to, exit);
        build(n, g.right(), p, from, to, exit);
        return;
    case GChor::Kind::Star: {
        const int head = n.fresh();
        n.eps(from, head);
        build(n, g.body(), p, head, head, to);
        n.eps(head, to);
        return;
    }
    case GChor::Kind::Break:
        if (exit < 0) throw ProjectionError("break outside of a loop");
        n.eps(from, exit);
        return;
    case GChor::Kind::Empty:
        n.eps(from, to);
        return;
    case GChor::Kind::Par:
        throw ProjectionError("parallel not projectable");
    }
}

struct Adjacency {
    std::vector<std::vector<int>> eps;
    std::vector<std::vector<std::pair<Action, int>>> labelled;

    explicit Adjacency(const Nfa& n) : eps(n.states), labelled(n.states) {
        for (const auto& e : n.edges) {
            if (e.label) {
                labelled[e.from].emplace_back(*e.label, e.to);
            } else {
                eps[e.from].push_back(e.to);
            }
        }
    }
};

std::vector<int> closure(const Adjacency& adj, const std::vector<int>& set) {
    std::set<int> seen(set.begin(), set.end());
    std::deque<int> work(set.begin(), set.end());
    while (!work.empty()) {
        int s = work.front();
        work.pop_front();
        for (int t : adj.eps[s])
            if (seen.insert(t).second) work.push_back(t);
    }
    return {seen.begin(), seen.end()};
}

Machine determinize(const Nfa& n, const std::string& name) {
    Machine m;
    m.name = name;
    const Adjacency adj(n);
    std::map<std::vector<int>, std::string> ids;
    std::vector<std::vector<int>> order;
    auto id_of = [&](const std::vector<int>& set) {
        auto it = ids.find(set);
        if (it != ids.end()) return it->second;
        std::string id = std::to_string(order.size());
        ids.emplace(set, id);
        order.push_back(set);
        m.states.push_back(id);
        return id;
    };
    m.initial = id_of(closure(adj, {0}));
    for (std::size_t i = 0; i < order.size(); ++i) {
        const std::vector<int> set = order[i];
        const std::string src = m.states[i];
        std::vector<std::pair<Action, std::vector<int>>> moves;  // in order of first appearance
        for (int s : set) {
            for (const auto& [a, t] : adj.labelled[s]) {
                auto it = std::find_if(moves.begin(), moves.end(), [&](const auto& mv) { return mv.first == a; });
                if (it == moves.end()) {
                    moves.emplace_back(a, std::vector<int>{});
                    it = moves.end() - 1;
                }
                it->second.push_back(t);
            }
        }
        for (const auto& [a, targets] : moves) {
            const std::string tgt = id_of(closure(adj, targets));
            m.transitions.push_back({src, a, tgt, {}});
        }
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& set = order[i];
        if (std::binary_search(set.begin(), set.end(), 1)) m.accepting.push_back(m.states[i]);
        std::vector<QosSpec> found;
        for (int s : set) {
            auto it = n.specs.find(s);
            if (it == n.specs.end()) continue;
            for (const auto& spec : it->second)
                if (std::find(found.begin(), found.end(), spec) == found.end()) found.push_back(spec);
        }
        if (found.size() > 1) throw ProjectionError("spec collision at state " + m.states[i] + " of " + name);
        if (found.size() == 1) m.specs[m.states[i]] = found.front();
    }
    return m;
}

}  // namespace

System project(const QGChor& qg) {
    if (contains_par(qg.body)) throw ProjectionError("parallel not projectable");
    std::vector<std::string> participants;
    collect_participants(qg.body, participants);
    if (participants.size() < 2) throw ProjectionError("a choreography needs at least two participants");
    System sys;
    sys.attributes = qg.attributes;
    for (const auto& p : participants) {
        Nfa n;
        build(n, qg.body, p, 0, 1, -1);
        sys.machines.push_back(determinize(n, p));
    }
    return sys;
}

}  // namespace qcheck
