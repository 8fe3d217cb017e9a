#pragma once

// Shared fixtures and brute-force reference routines for the test suites.
// Nothing here calls into the oracle namespace: these are the independent
// second routes the oracle and protocols are checked against.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dsketch/generators.hpp"
#include "dsketch/graph.hpp"
#include "dsketch/hierarchy.hpp"
#include "dsketch/label.hpp"

namespace dsketch::testing {

inline graph p3() { return load_edge_list("0 1 1\n1 2 1"); }
inline graph t3() { return load_edge_list("0 1 1\n1 2 1\n0 2 10"); }
inline graph p4() { return make_path(4); }

inline graph star(std::size_t leaves) {
    std::vector<edge> edges;
    for (std::size_t i = 1; i <= leaves; ++i) edges.push_back({0, static_cast<node_id>(i), 1});
    return graph(leaves + 1, std::move(edges));
}

// Exhaustive simple-path enumeration from s. For every target returns
// (minimum weight, fewest hops among minimum-weight paths). Exponential;
// keep n <= 10.
inline std::vector<std::pair<distance, std::size_t>> enumerate_paths(const graph& g, node_id s) {
    std::size_t n = g.node_count();
    std::vector<std::pair<distance, std::size_t>> best(n, {infinite_distance, 0});
    std::vector<char> on_path(n, 0);
    std::function<void(node_id, distance, std::size_t)> dfs = [&](node_id u, distance d, std::size_t hops) {
        if (std::make_pair(d, hops) < best[u]) best[u] = {d, hops};
        on_path[u] = 1;
        for (const auto& p : g.ports(u))
            if (!on_path[p.neighbor]) dfs(p.neighbor, d + p.weight, hops + 1);
        on_path[u] = 0;
    };
    dfs(s, 0, 0);
    return best;
}

// Plain relaxation to a fixed point (no priority queue): an independent
// all-pairs route for graphs too large to enumerate.
inline std::vector<std::vector<distance>> relaxation_apsp(const graph& g) {
    std::size_t n = g.node_count();
    std::vector<std::vector<distance>> d(n, std::vector<distance>(n, infinite_distance));
    for (std::size_t s = 0; s < n; ++s) {
        d[s][s] = 0;
        for (bool changed = true; changed;) {
            changed = false;
            for (const auto& e : g.edges()) {
                if (d[s][e.u] != infinite_distance && d[s][e.u] + e.w < d[s][e.v]) {
                    d[s][e.v] = d[s][e.u] + e.w;
                    changed = true;
                }
                if (d[s][e.v] != infinite_distance && d[s][e.v] + e.w < d[s][e.u]) {
                    d[s][e.u] = d[s][e.v] + e.w;
                    changed = true;
                }
            }
        }
    }
    return d;
}

// TZ label from the "closer than every higher-level node" characterization:
// w (level l) is in B(u) iff (d(u,w), w) < (d(u,x), x) for every x of level > l.
// Pivot p_i is the (distance, ID)-minimum over nodes of level >= i.
inline tz_label brute_force_label(const std::vector<std::vector<distance>>& d, const level_assignment& levels,
                                  node_id u) {
    std::size_t n = d.size();
    tz_label label;
    label.owner = u;
    label.k = levels.k;
    for (std::uint32_t i = 0; i < levels.k; ++i) {
        dist_key best;
        for (std::size_t x = 0; x < n; ++x)
            if (levels.level[x] >= static_cast<std::int32_t>(i))
                best = std::min(best, dist_key{d[u][x], static_cast<node_id>(x)});
        label.pivots.push_back({best.node, best.dist});
    }
    for (std::size_t w = 0; w < n; ++w) {
        if (levels.level[w] < 0) continue;
        bool in = true;
        for (std::size_t x = 0; x < n && in; ++x)
            if (levels.level[x] > levels.level[w])
                in = dist_key{d[u][w], static_cast<node_id>(w)} < dist_key{d[u][x], static_cast<node_id>(x)};
        if (in) label.bunch.push_back({static_cast<node_id>(w), static_cast<std::uint32_t>(levels.level[w]), d[u][w]});
    }
    return label;
}

// Small but varied corpus used by property tests.
struct named_graph {
    std::string name;
    graph g;
};

inline std::vector<named_graph> small_corpus() {
    std::vector<named_graph> out;
    out.push_back({"path16", make_path(16)});
    out.push_back({"path24w", make_path(24, {1, 8}, rng{3})});
    out.push_back({"grid5x5", make_grid(5, 5)});
    out.push_back({"grid6x7w", make_grid(6, 7, {1, 16}, rng{5})});
    out.push_back({"star9", star(9)});
    for (std::uint64_t seed : {1, 2, 3}) {
        out.push_back({"er32-" + std::to_string(seed), make_erdos_renyi(32, 0.2, {1, 16}, rng{seed})});
        out.push_back({"rw48-" + std::to_string(seed), make_random_weighted(48, 40, {1, 20}, rng{seed})});
    }
    out.push_back({"er64", make_erdos_renyi(64, 0.12, {1, 16}, rng{9})});
    return out;
}

}  // namespace dsketch::testing
