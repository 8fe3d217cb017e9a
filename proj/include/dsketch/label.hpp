#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <vector>

#include "dsketch/graph.hpp"

namespace dsketch {

// (distance, node ID) ordering: the single tie-break shared by the oracle and
// every protocol, which makes all distances operationally distinct.
struct dist_key {
    distance dist = infinite_distance;
    node_id node = no_node;

    friend constexpr auto operator<=>(const dist_key&, const dist_key&) = default;
};

inline constexpr dist_key infinite_key{};

struct pivot {
    node_id node = no_node;
    distance dist = infinite_distance;

    friend bool operator==(const pivot&, const pivot&) = default;
};

struct bunch_entry {
    node_id node;
    std::uint32_t level;
    distance dist;

    friend bool operator==(const bunch_entry&, const bunch_entry&) = default;
};

// Thorup-Zwick label of one node: its pivots p_0..p_{k-1} and its bunch,
// each bunch member tagged with the level of the B_i it belongs to. The bunch
// is kept sorted by node ID.
struct tz_label {
    node_id owner = no_node;
    std::uint32_t k = 0;
    std::vector<pivot> pivots;
    std::vector<bunch_entry> bunch;

    const bunch_entry* find(node_id v) const {
        auto it = std::lower_bound(bunch.begin(), bunch.end(), v,
                                   [](const bunch_entry& e, node_id x) { return e.node < x; });
        return (it != bunch.end() && it->node == v) ? &*it : nullptr;
    }

    // Distance to v if v is in B_level of this label.
    const bunch_entry* find_at_level(node_id v, std::uint32_t level) const {
        const auto* e = find(v);
        return (e && e->level == level) ? e : nullptr;
    }

    // Words as transmitted: owner, k, two per pivot, bunch size, three per entry.
    std::size_t words() const { return 3 + 2 * pivots.size() + 3 * bunch.size(); }

    friend bool operator==(const tz_label&, const tz_label&) = default;
};

inline void sort_bunch(std::vector<bunch_entry>& bunch) {
    std::sort(bunch.begin(), bunch.end(), [](const bunch_entry& a, const bunch_entry& b) { return a.node < b.node; });
}

}  // namespace dsketch
