#include "qcheck/lts.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <unordered_set>

namespace qcheck {

std::string to_string(const Configuration& c) {
    std::string out;
    for (const auto& [p, s] : c.locals) out += (out.empty() ? "" : " ") + p + "=" + s;
    for (const auto& [ch, msgs] : c.buffers) {
        if (msgs.empty()) continue;
        out += " " + ch.first + ch.second + "=[";
        for (std::size_t i = 0; i < msgs.size(); ++i) out += (i ? "," : "") + msgs[i];
        out += "]";
    }
    return out;
}

std::size_t Lts::VecHash::operator()(const std::vector<std::uint32_t>& v) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (auto x : v) {
        h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

Lts::Lts(const System& sys) : sys_(sys) {
    const std::size_t n = sys_.machines.size();
    auto index_of = [&](const std::string& name) -> std::uint32_t {
        for (std::size_t i = 0; i < n; ++i)
            if (sys_.machines[i].name == name) return static_cast<std::uint32_t>(i);
        throw std::invalid_argument("unknown participant " + name);
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) channels_.emplace_back(sys_.machines[i].name, sys_.machines[j].name);
    auto channel_of = [&](std::uint32_t i, std::uint32_t j) -> std::uint32_t {
        return static_cast<std::uint32_t>(i * (n - 1) + (j < i ? j : j - 1));
    };

    state_names_.resize(n);
    accepting_.resize(n);
    moves_.resize(n);
    std::vector<std::uint32_t> init(n);
    for (std::size_t p = 0; p < n; ++p) {
        const Machine& m = sys_.machines[p];
        state_names_[p] = m.states;
        auto state_index = [&](const std::string& s) -> std::uint32_t {
            auto it = std::find(m.states.begin(), m.states.end(), s);
            if (it == m.states.end()) throw std::invalid_argument("unknown state " + s + " of " + m.name);
            return static_cast<std::uint32_t>(it - m.states.begin());
        };
        accepting_[p].assign(m.states.size(), false);
        for (const auto& s : m.accepting) accepting_[p][state_index(s)] = true;
        init[p] = state_index(m.initial);
        moves_[p].resize(m.states.size());
        for (const auto& t : m.transitions) {
            auto ait = std::find(actions_.begin(), actions_.end(), t.action);
            if (ait == actions_.end()) {
                actions_.push_back(t.action);
                movers_.push_back(p);
                ait = actions_.end() - 1;
            }
            auto mit = std::find(messages_.begin(), messages_.end(), t.action.message);
            if (mit == messages_.end()) {
                messages_.push_back(t.action.message);
                mit = messages_.end() - 1;
            }
            Move mv{static_cast<ActionId>(ait - actions_.begin()), state_index(t.target),
                    channel_of(index_of(t.action.sender), index_of(t.action.receiver)),
                    static_cast<std::uint32_t>(mit - messages_.begin()),
                    t.action.kind == ActionKind::Output};
            moves_[p][state_index(t.source)].push_back(mv);
        }
    }
    std::vector<std::uint32_t> flat = init;
    flat.resize(n + channels_.size(), 0);
    intern_flat(std::move(flat));
}

ConfigId Lts::intern_flat(std::vector<std::uint32_t> flat) {
    auto it = index_.find(flat);
    if (it != index_.end()) return it->second;
    auto id = static_cast<ConfigId>(configs_.size());
    configs_.push_back(flat);
    index_.emplace(std::move(flat), id);
    succ_.emplace_back();
    succ_done_.push_back(false);
    return id;
}

bool Lts::accepting(ConfigId c) const {
    const auto& f = configs_[c];
    for (std::size_t p = 0; p < accepting_.size(); ++p)
        if (!accepting_[p][f[p]]) return false;
    return true;
}

const std::string& Lts::local_state(ConfigId c, std::size_t participant) const {
    return state_names_[participant][configs_[c][participant]];
}

std::vector<std::pair<ActionId, ConfigId>> Lts::compute(ConfigId c, std::size_t capacity) {
    const std::size_t n = state_names_.size();
    const std::vector<std::uint32_t> f = configs_[c];  // copy: interning may reallocate
    std::vector<std::size_t> offset(channels_.size());
    std::size_t pos = n;
    for (std::size_t ch = 0; ch < channels_.size(); ++ch) {
        offset[ch] = pos;
        pos += 1 + f[pos];
    }
    std::vector<std::pair<ActionId, ConfigId>> out;
    for (std::size_t p = 0; p < n; ++p) {
        for (const Move& mv : moves_[p][f[p]]) {
            const std::size_t off = offset[mv.channel];
            const std::uint32_t len = f[off];
            std::vector<std::uint32_t> g;
            if (mv.output) {
                if (capacity > 0 && len >= capacity) continue;
                g.reserve(f.size() + 1);
                g.insert(g.end(), f.begin(), f.begin() + static_cast<std::ptrdiff_t>(off + 1 + len));
                g.push_back(mv.message);
                g.insert(g.end(), f.begin() + static_cast<std::ptrdiff_t>(off + 1 + len), f.end());
                g[off] = len + 1;
            } else {
                if (len == 0 || f[off + 1] != mv.message) continue;
                g = f;
                g.erase(g.begin() + static_cast<std::ptrdiff_t>(off + 1));
                g[off] = len - 1;
            }
            g[p] = mv.target;
            out.emplace_back(mv.action, intern_flat(std::move(g)));
        }
    }
    return out;
}

const std::vector<std::pair<ActionId, ConfigId>>& Lts::successors(ConfigId c) {
    if (!succ_done_[c]) {
        auto s = compute(c, 0);
        succ_[c] = std::move(s);
        succ_done_[c] = true;
    }
    return succ_[c];
}

Configuration Lts::configuration(ConfigId c) const {
    const auto& f = configs_[c];
    Configuration out;
    const std::size_t n = state_names_.size();
    for (std::size_t p = 0; p < n; ++p) out.locals[sys_.machines[p].name] = state_names_[p][f[p]];
    std::size_t pos = n;
    for (const auto& ch : channels_) {
        auto& buf = out.buffers[ch];
        const std::uint32_t len = f[pos++];
        for (std::uint32_t i = 0; i < len; ++i) buf.push_back(messages_[f[pos++]]);
    }
    return out;
}

ConfigId Lts::intern(const Configuration& c) {
    const std::size_t n = state_names_.size();
    std::vector<std::uint32_t> flat(n);
    for (std::size_t p = 0; p < n; ++p) {
        auto it = c.locals.find(sys_.machines[p].name);
        if (it == c.locals.end()) throw std::invalid_argument("configuration misses " + sys_.machines[p].name);
        auto& names = state_names_[p];
        auto s = std::find(names.begin(), names.end(), it->second);
        if (s == names.end()) throw std::invalid_argument("unknown state " + it->second);
        flat[p] = static_cast<std::uint32_t>(s - names.begin());
    }
    if (c.locals.size() != n) throw std::invalid_argument("configuration has extra participants");
    for (const auto& [ch, msgs] : c.buffers)
        if (!msgs.empty() && std::find(channels_.begin(), channels_.end(), ch) == channels_.end())
            throw std::invalid_argument("unknown channel " + ch.first + ch.second);
    for (const auto& ch : channels_) {
        auto it = c.buffers.find(ch);
        if (it == c.buffers.end()) {
            flat.push_back(0);
            continue;
        }
        flat.push_back(static_cast<std::uint32_t>(it->second.size()));
        for (const auto& m : it->second) {
            auto mi = std::find(messages_.begin(), messages_.end(), m);
            // a message no transition mentions can never be consumed; give it a fresh id
            if (mi == messages_.end()) {
                messages_.push_back(m);
                mi = messages_.end() - 1;
            }
            flat.push_back(static_cast<std::uint32_t>(mi - messages_.begin()));
        }
    }
    return intern_flat(std::move(flat));
}

Run Lts::to_run(const Path& p) const {
    Run r;
    r.start = configuration(p.configs.front());
    for (std::size_t i = 0; i < p.actions.size(); ++i)
        r.steps.push_back({actions_[p.actions[i]], configuration(p.configs[i + 1])});
    return r;
}

Path Lts::to_path(const Run& r) {
    Path p;
    p.configs.push_back(intern(r.start));
    for (const auto& st : r.steps) {
        ConfigId next = intern(st.next);
        bool found = false;
        for (const auto& [a, c] : successors(p.configs.back())) {
            if (c == next && actions_[a] == st.action) {
                p.actions.push_back(a);
                found = true;
                break;
            }
        }
        if (!found) throw std::invalid_argument("not a step: " + st.action.to_string());
        p.configs.push_back(next);
    }
    return p;
}

bool Lts::dfs(Path& p, std::size_t length, const std::function<bool(const Path&)>& f) {
    if (p.length() == length) return f(p);
    const ConfigId c = p.configs.back();
    // copy: the successor table of c may be reallocated while recursing
    const auto succ = successors(c);
    for (const auto& [a, next] : succ) {
        p.actions.push_back(a);
        p.configs.push_back(next);
        const bool go_on = dfs(p, length, f);
        p.actions.pop_back();
        p.configs.pop_back();
        if (!go_on) return false;
    }
    return true;
}

bool Lts::for_each_path(std::size_t length, const std::function<bool(const Path&)>& f) {
    Path p;
    p.configs.push_back(initial());
    return dfs(p, length, f);
}

std::pair<std::size_t, std::size_t> Lts::reachable(std::size_t capacity) {
    if (capacity == 0) throw std::invalid_argument("buffer capacity must be positive");
    std::unordered_set<ConfigId> seen{initial()};
    std::deque<ConfigId> queue{initial()};
    std::size_t edges = 0;
    while (!queue.empty()) {
        ConfigId c = queue.front();
        queue.pop_front();
        for (const auto& [a, next] : compute(c, capacity)) {
            ++edges;
            if (seen.insert(next).second) queue.push_back(next);
        }
    }
    return {seen.size(), edges};
}

Configuration initial_configuration(const System& sys) {
    Lts lts(sys);
    return lts.configuration(lts.initial());
}

std::vector<std::pair<Action, Configuration>> enabled_steps(const System& sys, const Configuration& c) {
    Lts lts(sys);
    std::vector<std::pair<Action, Configuration>> out;
    for (const auto& [a, next] : lts.successors(lts.intern(c)))
        out.emplace_back(lts.action(a), lts.configuration(next));
    return out;
}

bool is_accepting(const System& sys, const Configuration& c) {
    for (const auto& m : sys.machines) {
        auto it = c.locals.find(m.name);
        if (it == c.locals.end() || !m.is_accepting(it->second)) return false;
    }
    return true;
}

std::vector<Run> enumerate_runs(const System& sys, std::size_t k) {
    Lts lts(sys);
    std::vector<Run> out;
    for (std::size_t i = 0; i <= k; ++i)
        lts.for_each_path(i, [&](const Path& p) {
            out.push_back(lts.to_run(p));
            return true;
        });
    return out;
}

Word trace_of(const Run& run) {
    Word w;
    w.reserve(run.steps.size());
    for (const auto& s : run.steps) w.push_back(s.action);
    return w;
}

std::pair<std::size_t, std::size_t> reachable_graph(const System& sys, std::size_t buffer_capacity) {
    Lts lts(sys);
    return lts.reachable(buffer_capacity);
}

}  // namespace qcheck
