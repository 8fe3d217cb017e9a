#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "dsketch/error.hpp"
#include "dsketch/graph.hpp"
#include "dsketch/rng.hpp"

namespace dsketch {

// level[u] = max{i : u in A_i}; -1 marks nodes outside A_0 (possible when the
// hierarchy is built over a subset such as a density net). A_k is empty.
struct level_assignment {
    std::uint32_t k = 1;
    std::vector<std::int32_t> level;

    std::size_t node_count() const { return level.size(); }
    bool in_level(node_id u, std::uint32_t i) const { return level[u] >= static_cast<std::int32_t>(i); }

    std::vector<node_id> members(std::uint32_t i) const {
        std::vector<node_id> out;
        for (std::size_t u = 0; u < level.size(); ++u)
            if (in_level(static_cast<node_id>(u), i)) out.push_back(static_cast<node_id>(u));
        return out;
    }

    // Sources of phase i: A_i \ A_{i+1}.
    std::vector<node_id> exact_level(std::uint32_t i) const {
        std::vector<node_id> out;
        for (std::size_t u = 0; u < level.size(); ++u)
            if (level[u] == static_cast<std::int32_t>(i)) out.push_back(static_cast<node_id>(u));
        return out;
    }

    bool has_empty_level() const {
        std::vector<char> seen(k, 0);
        for (auto l : level)
            for (std::int32_t i = 0; i <= l && i < static_cast<std::int32_t>(k); ++i) seen[i] = 1;
        for (auto s : seen)
            if (!s) return true;
        return false;
    }

    friend bool operator==(const level_assignment&, const level_assignment&) = default;
};

inline constexpr int hierarchy_retry_budget = 1024;

inline std::uint32_t ceil_log2(std::uint64_t x) {
    std::uint32_t r = 0;
    while ((std::uint64_t{1} << r) < x) ++r;
    return r;
}

// Every member is in A_0; each further level keeps a member independently
// with probability `keep`, capped at k-1. Redrawn on the next substream of
// `r` until every A_i with i <= k-1 is non-empty.
inline level_assignment sample_levels(const std::vector<char>& member, std::uint32_t k, double keep, const rng& r) {
    if (k < 1) throw error(error_kind::invalid_argument, "k must be at least 1");
    bool any = false;
    for (auto m : member) any = any || m;
    if (!any) throw error(error_kind::invalid_argument, "hierarchy over an empty member set");
    for (int attempt = 0; attempt < hierarchy_retry_budget; ++attempt) {
        rng draw = r.substream(static_cast<std::uint64_t>(attempt));
        level_assignment out{k, std::vector<std::int32_t>(member.size(), -1)};
        for (std::size_t u = 0; u < member.size(); ++u) {
            if (!member[u]) continue;
            std::int32_t l = 0;
            while (l + 1 < static_cast<std::int32_t>(k) && draw.coin(keep)) ++l;
            out.level[u] = l;
        }
        if (!out.has_empty_level()) return out;
    }
    throw error(error_kind::retry_budget, "resample budget exhausted");
}

// Standard hierarchy over all n nodes with keep probability n^{-1/k}.
inline level_assignment sample_hierarchy(std::size_t n, std::uint32_t k, const rng& r) {
    std::uint32_t k_max = std::max<std::uint32_t>(1, ceil_log2(n));
    if (k < 1 || k > k_max)
        throw error(error_kind::invalid_argument,
                    "k must lie in [1, " + std::to_string(k_max) + "] for n = " + std::to_string(n));
    double keep = std::pow(static_cast<double>(n), -1.0 / static_cast<double>(k));
    return sample_levels(std::vector<char>(n, 1), k, keep, r);
}

}  // namespace dsketch
