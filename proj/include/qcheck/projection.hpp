#pragma once

#include <stdexcept>
#include <vector>

#include "qcheck/gchor.hpp"
#include "qcheck/model.hpp"

namespace qcheck {

// A g-choreography whose interactions may carry QoS slot annotations.
struct QGChor {
    std::vector<QosAttributeDecl> attributes;
    GChor body;
    friend bool operator==(const QGChor&, const QGChor&) = default;
};

class ProjectionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One machine per participant, in order of first appearance in the body.
// Local automata are epsilon-free and deterministic; states are numbered 0, 1, ... in BFS order.
System project(const QGChor& qg);

}  // namespace qcheck
