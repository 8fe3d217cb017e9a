#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsketch/error.hpp"
#include "dsketch/graph.hpp"
#include "dsketch/rng.hpp"

namespace dsketch {

// Inclusive range edge weights are drawn from; {1, 1} gives unit weights
// and draws nothing from the rng.
struct weight_range {
    distance lo = 1;
    distance hi = 1;
};

namespace detail {

inline distance draw_weight(rng& r, weight_range w) { return w.lo == w.hi ? w.lo : r.uniform(w.lo, w.hi); }

inline void check_range(weight_range w) {
    if (w.lo > w.hi) throw error(error_kind::invalid_argument, "weight range lo > hi");
}

}  // namespace detail

inline graph make_path(std::size_t n, weight_range w = {}, rng r = rng{0}) {
    if (n == 0) throw error(error_kind::invalid_argument, "path needs at least one node");
    detail::check_range(w);
    std::vector<edge> edges;
    for (std::size_t i = 0; i + 1 < n; ++i)
        edges.push_back({static_cast<node_id>(i), static_cast<node_id>(i + 1), detail::draw_weight(r, w)});
    return graph(n, std::move(edges));
}

// rows x cols lattice; node (r, c) has ID r * cols + c.
inline graph make_grid(std::size_t rows, std::size_t cols, weight_range w = {}, rng r = rng{0}) {
    if (rows == 0 || cols == 0) throw error(error_kind::invalid_argument, "grid dimensions must be positive");
    detail::check_range(w);
    std::vector<edge> edges;
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            auto id = static_cast<node_id>(i * cols + j);
            if (j + 1 < cols) edges.push_back({id, id + 1, detail::draw_weight(r, w)});
            if (i + 1 < rows) edges.push_back({id, static_cast<node_id>(id + cols), detail::draw_weight(r, w)});
        }
    }
    return graph(rows * cols, std::move(edges));
}

inline constexpr int connect_retry_budget = 64;

// G(n, p), redrawn on a fresh substream until connected.
inline graph make_erdos_renyi(std::size_t n, double p, weight_range w, rng r) {
    if (n == 0) throw error(error_kind::invalid_argument, "erdos_renyi needs at least one node");
    if (!(p >= 0.0 && p <= 1.0)) throw error(error_kind::invalid_argument, "edge probability must lie in [0, 1]");
    detail::check_range(w);
    for (int attempt = 0; attempt < connect_retry_budget; ++attempt) {
        rng draw = r.substream(static_cast<std::uint64_t>(attempt));
        std::vector<edge> edges;
        for (std::size_t u = 0; u < n; ++u)
            for (std::size_t v = u + 1; v < n; ++v)
                if (draw.coin(p))
                    edges.push_back({static_cast<node_id>(u), static_cast<node_id>(v), detail::draw_weight(draw, w)});
        try {
            return graph(n, std::move(edges));
        } catch (const error& e) {
            if (std::string(e.what()) != "disconnected graph") throw;
        }
    }
    throw error(error_kind::retry_budget, "could not generate connected graph within retry budget");
}

// Random recursive tree (node i attaches to a uniform earlier node) plus
// `extra_edges` distinct random chords. Always connected.
inline graph make_random_weighted(std::size_t n, std::size_t extra_edges, weight_range w, rng r) {
    if (n == 0) throw error(error_kind::invalid_argument, "random_weighted needs at least one node");
    detail::check_range(w);
    std::size_t max_edges = n * (n - 1) / 2;
    if (n - 1 + extra_edges > max_edges)
        throw error(error_kind::invalid_argument, "too many extra edges for a simple graph");
    std::vector<std::vector<char>> present(n, std::vector<char>(n, 0));
    std::vector<edge> edges;
    for (std::size_t v = 1; v < n; ++v) {
        auto u = static_cast<node_id>(r.uniform(0, v - 1));
        present[u][v] = present[v][u] = 1;
        edges.push_back({u, static_cast<node_id>(v), detail::draw_weight(r, w)});
    }
    while (edges.size() < n - 1 + extra_edges) {
        auto u = static_cast<node_id>(r.uniform(0, n - 1));
        auto v = static_cast<node_id>(r.uniform(0, n - 1));
        if (u == v || present[u][v]) continue;
        present[u][v] = present[v][u] = 1;
        edges.push_back({u, v, detail::draw_weight(r, w)});
    }
    return graph(n, std::move(edges));
}

enum class graph_kind { path, grid, erdos_renyi, random_weighted };

inline graph_kind parse_graph_kind(const std::string& s) {
    if (s == "path") return graph_kind::path;
    if (s == "grid") return graph_kind::grid;
    if (s == "er" || s == "erdos_renyi") return graph_kind::erdos_renyi;
    if (s == "rw" || s == "random_weighted") return graph_kind::random_weighted;
    throw error(error_kind::invalid_argument, "unknown graph kind '" + s + "'");
}

// Only the fields the kind uses are read: n (path, er, rw), rows and cols
// (grid), p (er), extra (rw).
struct generator_params {
    graph_kind kind = graph_kind::path;
    std::size_t n = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    double p = 0.0;
    std::size_t extra = 0;
    weight_range w;
};

inline graph generate(const generator_params& gp, const rng& r) {
    switch (gp.kind) {
        case graph_kind::path: return make_path(gp.n, gp.w, r);
        case graph_kind::grid: return make_grid(gp.rows, gp.cols, gp.w, r);
        case graph_kind::erdos_renyi: return make_erdos_renyi(gp.n, gp.p, gp.w, r);
        case graph_kind::random_weighted: return make_random_weighted(gp.n, gp.extra, gp.w, r);
    }
    throw error(error_kind::invalid_argument, "unknown graph kind");
}

}  // namespace dsketch
