#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "dsketch/error.hpp"

namespace dsketch {

using node_id = std::uint32_t;
using distance = std::uint64_t;

inline constexpr distance infinite_distance = std::numeric_limits<distance>::max();
inline constexpr node_id no_node = std::numeric_limits<node_id>::max();

struct edge {
    node_id u;
    node_id v;
    distance w;

    friend bool operator==(const edge&, const edge&) = default;
};

// One incident edge as seen from its endpoint.
struct port {
    node_id neighbor;
    distance weight;
};

// Largest admissible edge weight for an n-node graph: weights are polynomial
// in n so any distance fits in one word.
constexpr distance max_edge_weight(std::size_t n) {
    distance base = std::max<distance>(n, 16);
    return base * base * base * base;
}

// Undirected, connected, simple graph with non-negative integer weights.
// Edges are stored once with u < v, sorted; each node's ports are sorted by
// neighbor ID. Immutable after construction.
class graph {
public:
    graph() = default;

    graph(std::size_t n, std::vector<edge> edges) : n_(n), edges_(std::move(edges)) {
        for (auto& e : edges_) {
            if (e.u == e.v) throw error(error_kind::graph, "self-loop at node " + std::to_string(e.u));
            if (e.u > e.v) std::swap(e.u, e.v);
            if (e.v >= n_) throw error(error_kind::graph, "edge endpoint out of range");
            if (e.w > max_edge_weight(n_))
                throw error(error_kind::graph, "edge weight " + std::to_string(e.w) + " exceeds polynomial bound");
        }
        std::sort(edges_.begin(), edges_.end(),
                  [](const edge& a, const edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
        for (std::size_t i = 1; i < edges_.size(); ++i) {
            if (edges_[i].u == edges_[i - 1].u && edges_[i].v == edges_[i - 1].v)
                throw error(error_kind::graph, "duplicate edge " + std::to_string(edges_[i].u) + " " +
                                                   std::to_string(edges_[i].v));
        }
        adjacency_.assign(n_, {});
        for (const auto& e : edges_) {
            adjacency_[e.u].push_back({e.v, e.w});
            adjacency_[e.v].push_back({e.u, e.w});
        }
        for (auto& ports : adjacency_)
            std::sort(ports.begin(), ports.end(), [](const port& a, const port& b) { return a.neighbor < b.neighbor; });
        if (!connected()) throw error(error_kind::graph, "disconnected graph");
    }

    std::size_t node_count() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<edge>& edges() const { return edges_; }
    const std::vector<port>& ports(node_id u) const { return adjacency_[u]; }
    std::size_t degree(node_id u) const { return adjacency_[u].size(); }

    // Index of `neighbor` in ports(u), or ports(u).size() when absent.
    std::size_t port_of(node_id u, node_id neighbor) const {
        const auto& ps = adjacency_[u];
        auto it = std::lower_bound(ps.begin(), ps.end(), neighbor,
                                   [](const port& p, node_id x) { return p.neighbor < x; });
        return (it != ps.end() && it->neighbor == neighbor) ? static_cast<std::size_t>(it - ps.begin()) : ps.size();
    }

    friend bool operator==(const graph& a, const graph& b) { return a.n_ == b.n_ && a.edges_ == b.edges_; }

private:
    bool connected() const {
        if (n_ == 0) return false;
        std::vector<char> seen(n_, 0);
        std::vector<node_id> stack{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            node_id u = stack.back();
            stack.pop_back();
            for (const auto& p : adjacency_[u]) {
                if (!seen[p.neighbor]) {
                    seen[p.neighbor] = 1;
                    ++count;
                    stack.push_back(p.neighbor);
                }
            }
        }
        return count == n_;
    }

    std::size_t n_ = 0;
    std::vector<edge> edges_;
    std::vector<std::vector<port>> adjacency_;
};

// Edge-list text: one "u v w" per line, '#' starts a comment line. Node IDs
// are compacted to 0..n-1 in order of first appearance.
inline graph load_edge_list(std::istream& in) {
    std::unordered_map<std::uint64_t, node_id> ids;
    std::vector<edge> edges;
    std::string line;
    std::size_t line_no = 0;
    auto intern = [&](std::uint64_t raw) {
        auto [it, inserted] = ids.try_emplace(raw, static_cast<node_id>(ids.size()));
        return it->second;
    };
    auto fail = [&](const std::string& msg) {
        return error(error_kind::parse, "line " + std::to_string(line_no) + ": " + msg);
    };
    auto parse_field = [&](const std::string& tok, const char* what) -> std::uint64_t {
        if (tok.empty()) throw fail(std::string("missing ") + what);
        if (tok[0] == '-') {
            if (std::string(what) == "weight") throw error(error_kind::graph, "line " + std::to_string(line_no) + ": negative weight");
            throw fail(std::string("negative ") + what);
        }
        std::uint64_t v = 0;
        for (char c : tok) {
            if (c < '0' || c > '9') throw fail("expected decimal integer " + std::string(what) + ", got '" + tok + "'");
            if (v > (std::numeric_limits<std::uint64_t>::max() - 9) / 10) throw fail(std::string(what) + " overflows");
            v = v * 10 + static_cast<std::uint64_t>(c - '0');
        }
        return v;
    };
    while (std::getline(in, line)) {
        ++line_no;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream fields(line);
        std::string a, b, w, extra;
        fields >> a >> b >> w;
        if (w.empty()) throw fail("expected 'u v w'");
        if (fields >> extra) throw fail("trailing field '" + extra + "'");
        auto ru = parse_field(a, "node");
        auto rv = parse_field(b, "node");
        auto weight = parse_field(w, "weight");
        node_id u = intern(ru);
        node_id v = intern(rv);
        edges.push_back({u, v, weight});
    }
    if (ids.empty()) throw error(error_kind::parse, "empty edge list");
    return graph(ids.size(), std::move(edges));
}

inline graph load_edge_list(const std::string& text) {
    std::istringstream in(text);
    return load_edge_list(in);
}

inline void write_edge_list(std::ostream& out, const graph& g) {
    for (const auto& e : g.edges()) out << e.u << ' ' << e.v << ' ' << e.w << '\n';
}

inline std::string to_edge_list(const graph& g) {
    std::ostringstream out;
    write_edge_list(out, g);
    return out.str();
}

// Relabels nodes in BFS order from node 0 (neighbors by ascending ID). That
// order coincides with first appearance in the sorted edge listing, so
// load_edge_list(to_edge_list(c)) == c for every canonical c.
inline graph canonicalize(const graph& g) {
    std::vector<node_id> label(g.node_count(), no_node);
    std::vector<node_id> order{0};
    label[0] = 0;
    for (std::size_t head = 0; head < order.size(); ++head) {
        for (const auto& p : g.ports(order[head])) {
            if (label[p.neighbor] == no_node) {
                label[p.neighbor] = static_cast<node_id>(order.size());
                order.push_back(p.neighbor);
            }
        }
    }
    std::vector<edge> edges;
    edges.reserve(g.edge_count());
    for (const auto& e : g.edges()) edges.push_back({label[e.u], label[e.v], e.w});
    return graph(g.node_count(), std::move(edges));
}

}  // namespace dsketch
