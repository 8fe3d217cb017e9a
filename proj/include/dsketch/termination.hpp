#pragma once

#include <cstdint>
#include <vector>

#include "dsketch/error.hpp"
#include "dsketch/graph.hpp"

namespace dsketch {

// Unweighted BFS tree used to route COMPLETE up to the root and START back
// down. Ties go to the smallest-ID parent (BFS visits ports in ID order).
struct bfs_tree {
    node_id root = 0;
    std::vector<node_id> parent;                 // no_node at the root
    std::vector<std::vector<node_id>> children;  // ascending IDs
    std::vector<std::uint32_t> depth;
    std::uint32_t height = 0;
};

inline bfs_tree termination_overlay(const graph& g, node_id root) {
    std::size_t n = g.node_count();
    if (root >= n) throw error(error_kind::invalid_argument, "root out of range");
    bfs_tree t;
    t.root = root;
    t.parent.assign(n, no_node);
    t.children.assign(n, {});
    t.depth.assign(n, 0);
    std::vector<char> seen(n, 0);
    std::vector<node_id> queue{root};
    seen[root] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        node_id u = queue[head];
        for (const auto& p : g.ports(u)) {
            if (seen[p.neighbor]) continue;
            seen[p.neighbor] = 1;
            t.parent[p.neighbor] = u;
            t.depth[p.neighbor] = t.depth[u] + 1;
            t.height = std::max(t.height, t.depth[p.neighbor]);
            t.children[u].push_back(p.neighbor);
            queue.push_back(p.neighbor);
        }
    }
    return t;
}

}  // namespace dsketch
