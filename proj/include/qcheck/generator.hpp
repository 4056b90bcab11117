#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace qcheck {

// Two-party choreography where Bob and Alice take turns choosing m0 or m1 for n rounds;
// every path ends with a distinct leaf message whose receiver pins five attributes.
struct NestedChoices {
    unsigned depth = 0;
    std::string qosgc;
    std::string ql;
    std::vector<std::array<long, 5>> leaf_values;  // leaf i+1
    std::size_t chosen_leaf = 0;                    // 1-based
};

inline constexpr std::array<const char*, 5> kNestedAttributes = {"cost", "time", "mem", "energy", "load"};

// 1 <= n <= 16. Deterministic in (n, seed).
NestedChoices gen_nested_choices(unsigned n, std::uint64_t seed);

}  // namespace qcheck
