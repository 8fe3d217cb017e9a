#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>

#include "dsketch/error.hpp"
#include "dsketch/gd_protocol.hpp"
#include "dsketch/label.hpp"
#include "dsketch/slack_protocol.hpp"

namespace dsketch {

// Smallest i with p_i(u) in B_i(v) or p_i(v) in B_i(u); the estimate is the
// pivot's distance to both endpoints. When both directions witness at the
// same i the smaller sum is returned, which keeps the estimate symmetric.
inline distance tz_estimate(const tz_label& lu, const tz_label& lv) {
    if (lu.k != lv.k || lu.pivots.size() != lu.k || lv.pivots.size() != lv.k)
        throw error(error_kind::incompatible, "incompatible labels");
    for (std::uint32_t i = 0; i < lu.k; ++i) {
        std::optional<distance> best;
        const auto& pu = lu.pivots[i];
        if (const auto* e = lv.find_at_level(pu.node, i)) best = pu.dist + e->dist;
        const auto& pv = lv.pivots[i];
        if (const auto* e = lu.find_at_level(pv.node, i)) best = std::min(best.value_or(infinite_distance), pv.dist + e->dist);
        if (best) return *best;
    }
    // B_{k-1} is all of A_{k-1}, so a witness exists at k-1 for valid labels.
    throw error(error_kind::incompatible, "invariant violated: no witness level");
}

inline distance slack3_estimate(const slack3_sketch& su, const slack3_sketch& sv) {
    if (su.table.size() != sv.table.size() || su.table.empty()) throw error(error_kind::incompatible, "net mismatch");
    distance best = infinite_distance;
    for (std::size_t j = 0; j < su.table.size(); ++j) {
        if (su.table[j].first != sv.table[j].first) throw error(error_kind::incompatible, "net mismatch");
        best = std::min(best, su.table[j].second + sv.table[j].second);
    }
    return best;
}

inline distance cdg_estimate(const cdg_sketch& cu, const cdg_sketch& cv) {
    return cu.dist + tz_estimate(cu.net_label, cv.net_label) + cv.dist;
}

inline distance gd_estimate(const gd_sketch& gu, const gd_sketch& gv) {
    if (gu.levels.size() != gv.levels.size() || gu.levels.empty())
        throw error(error_kind::incompatible, "incompatible levels");
    distance best = infinite_distance;
    for (std::size_t j = 0; j < gu.levels.size(); ++j) {
        if (gu.levels[j].i != gv.levels[j].i || gu.levels[j].k != gv.levels[j].k)
            throw error(error_kind::incompatible, "incompatible levels");
        best = std::min(best, cdg_estimate(gu.levels[j].sketch, gv.levels[j].sketch));
    }
    return best;
}

}  // namespace dsketch
