#include "qcheck/aggregation.hpp"

#include <set>

namespace qcheck {

std::vector<StateOccurrence> occurrences(const System& sys, const Run& run) {
    std::vector<StateOccurrence> out;
    auto visit = [&](const std::string& participant, const std::string& state) {
        const Machine* m = sys.machine(participant);
        if (m == nullptr) throw AggregationError("unknown participant " + participant);
        if (const QosSpec* s = m->spec(state)) out.push_back({participant, state, out.size(), *s});
    };
    for (const auto& m : sys.machines) {
        auto it = run.start.locals.find(m.name);
        if (it == run.start.locals.end()) throw AggregationError("run start misses " + m.name);
        visit(m.name, it->second);
    }
    for (const auto& st : run.steps) {
        const std::string& mover = st.action.subject();
        auto it = st.next.locals.find(mover);
        if (it == st.next.locals.end()) throw AggregationError("step misses " + mover);
        visit(mover, it->second);
    }
    return out;
}

std::vector<StateOccurrence> occurrences(const Lts& lts, const Path& path, std::size_t prefix) {
    const System& sys = lts.system();
    std::vector<StateOccurrence> out;
    auto visit = [&](std::size_t p, ConfigId c) {
        const Machine& m = sys.machines[p];
        const std::string& state = lts.local_state(c, p);
        if (const QosSpec* s = m.spec(state)) out.push_back({m.name, state, out.size(), *s});
    };
    for (std::size_t p = 0; p < lts.participant_count(); ++p) visit(p, path.configs.front());
    for (std::size_t i = 0; i < prefix; ++i) visit(lts.mover(path.actions[i]), path.configs[i + 1]);
    return out;
}

SmtTerm fold(const std::string& op, const std::vector<SmtTerm>& operands) {
    if (operands.empty()) throw AggregationError("fold over no operands");
    SmtTerm acc = operands.front();
    for (std::size_t i = 1; i < operands.size(); ++i) {
        const SmtTerm& x = operands[i];
        if (op == "min" || op == "max") {
            acc = SmtTerm::app("ite", {SmtTerm::app(op == "min" ? "<=" : ">=", {acc, x}), acc, x});
        } else {
            acc = SmtTerm::app(op, {acc, x});
        }
    }
    return acc;
}

AggregationContext aggregate(const System& sys, const std::vector<StateOccurrence>& occs) {
    AggregationContext ctx;
    std::set<std::string> taken;
    for (const auto& a : sys.attributes) taken.insert(a.name);
    for (const auto& occ : occs) {
        std::set<std::string> mentioned;
        for (const auto& c : occ.spec.constraints) {
            for (const auto& v : free_variables(c)) {
                if (sys.attribute(v) == nullptr) throw AggregationError("unknown attribute " + v + " in spec of " +
                                                                         occ.participant + "@" + occ.state);
                mentioned.insert(v);
            }
        }
        std::map<std::string, std::string> names;
        for (const auto& a : sys.attributes) {
            if (!mentioned.count(a.name)) continue;
            std::string copy = a.name + "_" + std::to_string(occ.index);
            while (taken.count(copy)) copy += "_";
            taken.insert(copy);
            names[a.name] = copy;
            ctx.copies[a.name].push_back(copy);
        }
        for (const auto& c : occ.spec.constraints) ctx.instances.push_back(rename(c, names));
    }
    for (const auto& a : sys.attributes) {
        auto it = ctx.copies.find(a.name);
        if (it == ctx.copies.end()) continue;
        std::vector<SmtTerm> vars;
        for (const auto& v : it->second) vars.push_back(SmtTerm::var(v));
        ctx.aggregates.emplace(a.name, fold(a.op, vars));
    }
    return ctx;
}

SmtScript build_entailment_query(const System& sys, const std::vector<StateOccurrence>& occs, const SmtTerm& psi) {
    for (const auto& v : free_variables(psi))
        if (sys.attribute(v) == nullptr) throw AggregationError("unknown attribute " + v + " in " + psi.to_string());
    AggregationContext ctx = aggregate(sys, occs);
    SmtScript script;
    for (const auto& a : sys.attributes) script.declarations.push_back(a.name);
    for (const auto& [attr, copies] : ctx.copies)
        script.declarations.insert(script.declarations.end(), copies.begin(), copies.end());
    script.assertions = ctx.instances;
    for (const auto& a : sys.attributes) {
        auto it = ctx.aggregates.find(a.name);
        if (it != ctx.aggregates.end())
            script.assertions.push_back(SmtTerm::app("=", {SmtTerm::var(a.name), it->second}));
    }
    script.assertions.push_back(SmtTerm::app("not", {psi}));
    return script;
}

SmtScript build_entailment_query(const System& sys, const Run& run, const SmtTerm& psi) {
    return build_entailment_query(sys, occurrences(sys, run), psi);
}

bool decide_entailment(SatResult r) {
    if (r == SatResult::Unknown) throw SolverError("solver answered unknown");
    return r == SatResult::Unsat;
}

bool entails(const System& sys, const Run& run, const SmtTerm& psi, SolverHandle& solver) {
    return decide_entailment(solver.check_sat(build_entailment_query(sys, run, psi)));
}

}  // namespace qcheck
