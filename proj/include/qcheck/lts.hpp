#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qcheck/model.hpp"

namespace qcheck {

using Channel = std::pair<std::string, std::string>;

struct Configuration {
    std::map<std::string, std::string> locals;
    std::map<Channel, std::vector<std::string>> buffers;

    friend bool operator==(const Configuration&, const Configuration&) = default;
};

std::string to_string(const Configuration& c);

struct Step {
    Action action;
    Configuration next;
    friend bool operator==(const Step&, const Step&) = default;
};

struct Run {
    Configuration start;
    std::vector<Step> steps;

    [[nodiscard]] std::size_t length() const { return steps.size(); }
    [[nodiscard]] const Configuration& last() const { return steps.empty() ? start : steps.back().next; }
    friend bool operator==(const Run&, const Run&) = default;
};

Configuration initial_configuration(const System& sys);
std::vector<std::pair<Action, Configuration>> enabled_steps(const System& sys, const Configuration& c);
bool is_accepting(const System& sys, const Configuration& c);
// All runs of length 0..k, shorter runs first.
std::vector<Run> enumerate_runs(const System& sys, std::size_t k);
Word trace_of(const Run& run);
// Configurations and step edges reachable when every channel holds at most `buffer_capacity` messages.
std::pair<std::size_t, std::size_t> reachable_graph(const System& sys, std::size_t buffer_capacity);

using ConfigId = std::uint32_t;
using ActionId = std::uint32_t;

// A run over interned configurations: configs.size() == actions.size() + 1.
struct Path {
    std::vector<ConfigId> configs;
    std::vector<ActionId> actions;
    [[nodiscard]] std::size_t length() const { return actions.size(); }
};

// Indexed view of a system with hash-consed configurations. The system must be valid.
class Lts {
public:
    explicit Lts(const System& sys);

    [[nodiscard]] const System& system() const { return sys_; }
    [[nodiscard]] ConfigId initial() const { return 0; }
    const std::vector<std::pair<ActionId, ConfigId>>& successors(ConfigId c);
    [[nodiscard]] bool accepting(ConfigId c) const;

    [[nodiscard]] const Action& action(ActionId a) const { return actions_[a]; }
    [[nodiscard]] std::size_t action_count() const { return actions_.size(); }
    // Index of the machine performing the action.
    [[nodiscard]] std::size_t mover(ActionId a) const { return movers_[a]; }
    [[nodiscard]] std::size_t participant_count() const { return sys_.machines.size(); }
    [[nodiscard]] const std::string& local_state(ConfigId c, std::size_t participant) const;

    [[nodiscard]] Configuration configuration(ConfigId c) const;
    ConfigId intern(const Configuration& c);
    [[nodiscard]] std::size_t interned() const { return configs_.size(); }

    [[nodiscard]] Run to_run(const Path& p) const;
    // Throws std::invalid_argument when `r` is not a run of the system.
    Path to_path(const Run& r);

    // Calls `f` on every path of exactly `length` steps from the initial configuration,
    // in canonical order. Stops early when `f` returns false; returns false in that case.
    bool for_each_path(std::size_t length, const std::function<bool(const Path&)>& f);

    // BFS with channels capped at `capacity`.
    std::pair<std::size_t, std::size_t> reachable(std::size_t capacity);

private:
    struct Move {
        ActionId action;
        std::uint32_t target;
        std::uint32_t channel;
        std::uint32_t message;
        bool output;
    };
    struct VecHash {
        std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept;
    };

    std::vector<std::pair<ActionId, ConfigId>> compute(ConfigId c, std::size_t capacity);
    ConfigId intern_flat(std::vector<std::uint32_t> flat);
    bool dfs(Path& p, std::size_t length, const std::function<bool(const Path&)>& f);

    System sys_;
    std::vector<std::vector<std::string>> state_names_;
    std::vector<std::vector<bool>> accepting_;
    std::vector<std::vector<std::vector<Move>>> moves_;  // machine -> state -> moves
    std::vector<Channel> channels_;
    std::vector<std::string> messages_;
    std::vector<Action> actions_;
    std::vector<std::size_t> movers_;

    // flat layout: locals, then per channel its length followed by message ids
    std::vector<std::vector<std::uint32_t>> configs_;
    std::unordered_map<std::vector<std::uint32_t>, ConfigId, VecHash> index_;
    std::vector<std::vector<std::pair<ActionId, ConfigId>>> succ_;
    std::vector<bool> succ_done_;
};

}  // namespace qcheck
