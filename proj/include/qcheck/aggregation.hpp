#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcheck/lts.hpp"
#include "qcheck/model.hpp"
#include "qcheck/smt_backend.hpp"

namespace qcheck {

struct StateOccurrence {
    std::string participant;
    std::string state;
    std::size_t index = 0;
    QosSpec spec;
    friend bool operator==(const StateOccurrence&, const StateOccurrence&) = default;
};

class AggregationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Initial states in participant order, then the mover's target state of each step,
// keeping only states that carry a spec.
std::vector<StateOccurrence> occurrences(const System& sys, const Run& run);
// Same for the first `prefix` steps of an interned path.
std::vector<StateOccurrence> occurrences(const Lts& lts, const Path& path, std::size_t prefix);

struct AggregationContext {
    // Attribute -> copy variables, one per occurrence whose spec mentions the attribute.
    std::map<std::string, std::vector<std::string>> copies;
    // Occurrence constraints over the copies.
    std::vector<SmtTerm> instances;
    // Attribute -> definition of its aggregate; attributes without copies are absent.
    std::map<std::string, SmtTerm> aggregates;
};

AggregationContext aggregate(const System& sys, const std::vector<StateOccurrence>& occs);

// Left fold of a binary operator; min and max become ite terms.
SmtTerm fold(const std::string& op, const std::vector<SmtTerm>& operands);

SmtScript build_entailment_query(const System& sys, const std::vector<StateOccurrence>& occs, const SmtTerm& psi);
SmtScript build_entailment_query(const System& sys, const Run& run, const SmtTerm& psi);

// Throws SolverError when the solver answers unknown.
bool entails(const System& sys, const Run& run, const SmtTerm& psi, SolverHandle& solver);
bool decide_entailment(SatResult r);

}  // namespace qcheck
