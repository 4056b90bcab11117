#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "qcheck/model.hpp"

namespace qcheck {

// QoS annotations of an interaction: pre/post states of sender and receiver.
struct InteractionQos {
    std::optional<QosSpec> sqos;
    std::optional<QosSpec> rqos;
    std::optional<QosSpec> sqos_post;
    std::optional<QosSpec> rqos_post;

    [[nodiscard]] bool empty() const { return !sqos && !rqos && !sqos_post && !rqos_post; }
    friend bool operator==(const InteractionQos&, const InteractionQos&) = default;
};

class GChorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Immutable g-choreography tree.
class GChor {
public:
    enum class Kind { Interaction, Seq, Choice, Star, Par, Break, Empty };

    GChor();  // Empty

    static GChor interaction(std::string sender, std::string receiver, std::string message,
                             InteractionQos qos = {});
    static GChor seq(GChor a, GChor b);
    static GChor choice(GChor a, GChor b);
    static GChor par(GChor a, GChor b);
    static GChor star(GChor body);
    // One or more iterations.
    static GChor repeat1(GChor body);
    static GChor brk();
    static GChor empty();

    [[nodiscard]] GChor with_span(SourceSpan span) const;

    [[nodiscard]] Kind kind() const;
    [[nodiscard]] const std::string& sender() const;
    [[nodiscard]] const std::string& receiver() const;
    [[nodiscard]] const std::string& message() const;
    [[nodiscard]] const InteractionQos& qos() const;
    [[nodiscard]] const GChor& left() const;
    [[nodiscard]] const GChor& right() const;
    [[nodiscard]] const GChor& body() const;
    [[nodiscard]] const SourceSpan& span() const;

    [[nodiscard]] Action output() const;
    [[nodiscard]] Action input() const;

    // Surface syntax, re-parseable (annotations included when `with_qos`).
    [[nodiscard]] std::string to_string(bool with_qos = false) const;

    // Structural equality; spans are ignored.
    friend bool operator==(const GChor& a, const GChor& b);
    friend bool operator!=(const GChor& a, const GChor& b) { return !(a == b); }

private:
    struct Node;
    explicit GChor(std::shared_ptr<const Node> n);
    std::shared_ptr<const Node> node_;
};

bool contains_star(const GChor& g);
bool contains_break(const GChor& g);
bool contains_par(const GChor& g);
std::size_t interaction_count(const GChor& g);

// Replaces every Star by the choice of its 0..u iterations. A Break ends the loop it
// belongs to. Throws GChorError on a Break outside any Star or under a Par.
GChor unfold(const GChor& g, unsigned u);

struct Pomset {
    std::vector<Action> labels;  // indices form a linear extension of the order
    std::vector<boost::dynamic_bitset<>> below;  // below[j]: events strictly before j (closed)

    [[nodiscard]] std::size_t size() const { return labels.size(); }
    [[nodiscard]] bool precedes(std::size_t i, std::size_t j) const { return below[j].test(i); }
};

// Requires a star-free, break-free g-choreography.
std::vector<Pomset> pomsets_of(const GChor& g);

// Words compatible with some pomset of unfold(g, u), tracked by frontier sets.
class Language {
public:
    using Frontier = std::pair<std::uint32_t, boost::dynamic_bitset<>>;  // pomset, consumed events
    using State = std::vector<Frontier>;                                  // sorted, unique

    Language(const GChor& g, unsigned u);

    [[nodiscard]] const std::vector<Pomset>& pomsets() const { return pomsets_; }

    [[nodiscard]] State start() const;
    [[nodiscard]] State advance(const State& s, const Action& a) const;
    // Non-empty state: the word read so far is in L[G].
    [[nodiscard]] static bool alive(const State& s) { return !s.empty(); }
    // Some pomset fully consumed: the word read so far is in L^[G].
    [[nodiscard]] bool complete(const State& s) const;

    [[nodiscard]] bool contains(const Word& w) const;
    [[nodiscard]] bool maximal(const Word& w) const;

private:
    std::vector<Pomset> pomsets_;
};

bool word_in_language(const GChor& g, unsigned u, const Word& w);
bool word_maximal(const GChor& g, unsigned u, const Word& w);

}  // namespace qcheck
