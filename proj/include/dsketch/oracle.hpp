#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <queue>
#include <utility>
#include <vector>

#include "dsketch/error.hpp"
#include "dsketch/graph.hpp"
#include "dsketch/hierarchy.hpp"
#include "dsketch/label.hpp"
#include "dsketch/rational.hpp"

// Exact reference computations. Everything here is centralized and
// quadratic-or-worse; it exists to be ground truth for the protocols.
namespace dsketch::oracle {

struct distance_table {
    node_id source = 0;
    std::vector<distance> dist;
};

inline distance_table sssp_exact(const graph& g, node_id s) {
    if (s >= g.node_count()) throw error(error_kind::invalid_argument, "source out of range");
    distance_table t{s, std::vector<distance>(g.node_count(), infinite_distance)};
    using item = std::pair<distance, node_id>;
    std::priority_queue<item, std::vector<item>, std::greater<>> heap;
    t.dist[s] = 0;
    heap.push({0, s});
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d != t.dist[u]) continue;
        for (const auto& p : g.ports(u)) {
            if (d + p.weight < t.dist[p.neighbor]) {
                t.dist[p.neighbor] = d + p.weight;
                heap.push({t.dist[p.neighbor], p.neighbor});
            }
        }
    }
    return t;
}

class distance_matrix {
public:
    distance_matrix() = default;
    explicit distance_matrix(const graph& g) : n_(g.node_count()), d_(n_ * n_) {
        for (std::size_t s = 0; s < n_; ++s) {
            auto row = sssp_exact(g, static_cast<node_id>(s)).dist;
            std::copy(row.begin(), row.end(), d_.begin() + static_cast<std::ptrdiff_t>(s * n_));
        }
    }

    std::size_t node_count() const { return n_; }
    distance operator()(node_id u, node_id v) const { return d_[static_cast<std::size_t>(u) * n_ + v]; }

private:
    std::size_t n_ = 0;
    std::vector<distance> d_;
};

// Max over pairs of the fewest hops among minimum-weight paths: Dijkstra on
// the lexicographic key (weight, hops).
inline std::size_t shortest_path_diameter(const graph& g) {
    std::size_t n = g.node_count();
    std::size_t best = 0;
    using key = std::pair<distance, std::size_t>;
    using item = std::pair<key, node_id>;
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<key> k(n, {infinite_distance, 0});
        std::priority_queue<item, std::vector<item>, std::greater<>> heap;
        k[s] = {0, 0};
        heap.push({k[s], static_cast<node_id>(s)});
        while (!heap.empty()) {
            auto [cur, u] = heap.top();
            heap.pop();
            if (cur != k[u]) continue;
            for (const auto& p : g.ports(u)) {
                key cand{cur.first + p.weight, cur.second + 1};
                if (cand < k[p.neighbor]) {
                    k[p.neighbor] = cand;
                    heap.push({cand, p.neighbor});
                }
            }
        }
        for (const auto& x : k) best = std::max(best, x.second);
    }
    return best;
}

inline std::size_t hop_diameter(const graph& g) {
    std::size_t n = g.node_count();
    std::size_t best = 0;
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<std::size_t> hops(n, SIZE_MAX);
        std::vector<node_id> queue{static_cast<node_id>(s)};
        hops[s] = 0;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            node_id u = queue[head];
            for (const auto& p : g.ports(u)) {
                if (hops[p.neighbor] == SIZE_MAX) {
                    hops[p.neighbor] = hops[u] + 1;
                    best = std::max(best, hops[p.neighbor]);
                    queue.push_back(p.neighbor);
                }
            }
        }
    }
    return best;
}

// Thorup-Zwick labels computed directly from the definitions:
//   p_i(u) = (distance, ID)-minimal member of A_i
//   B_i(u) = {w in A_i : (d(u,w), w) < (d(u,A_{i+1}), p_{i+1}(u))}
// Labels are produced for every node of the matrix, members or not.
inline std::vector<tz_label> centralized_tz(const distance_matrix& dm, const level_assignment& levels) {
    std::size_t n = dm.node_count();
    if (levels.node_count() != n) throw error(error_kind::invalid_argument, "level assignment size mismatch");
    if (levels.has_empty_level()) throw error(error_kind::invalid_argument, "empty level");
    std::uint32_t k = levels.k;
    std::vector<tz_label> labels(n);
    std::vector<dist_key> best(k + 1);
    for (std::size_t ui = 0; ui < n; ++ui) {
        auto u = static_cast<node_id>(ui);
        std::fill(best.begin(), best.end(), infinite_key);
        for (std::size_t w = 0; w < n; ++w) {
            auto l = levels.level[w];
            if (l < 0) continue;
            dist_key key{dm(u, static_cast<node_id>(w)), static_cast<node_id>(w)};
            auto& slot = best[static_cast<std::size_t>(std::min<std::int32_t>(l, static_cast<std::int32_t>(k) - 1))];
            slot = std::min(slot, key);
        }
        // Suffix minimum: best[i] becomes the key of p_i(u); best[k] stays infinite.
        for (std::size_t i = k - 1; i-- > 0;) best[i] = std::min(best[i], best[i + 1]);

        tz_label& label = labels[u];
        label.owner = u;
        label.k = k;
        for (std::uint32_t i = 0; i < k; ++i) label.pivots.push_back({best[i].node, best[i].dist});
        for (std::size_t w = 0; w < n; ++w) {
            auto l = levels.level[w];
            if (l < 0) continue;
            auto li = std::min<std::uint32_t>(static_cast<std::uint32_t>(l), k - 1);
            dist_key key{dm(u, static_cast<node_id>(w)), static_cast<node_id>(w)};
            if (key < best[li + 1]) label.bunch.push_back({static_cast<node_id>(w), li, key.dist});
        }
    }
    return labels;
}

// |{w : d(u,w) < d(u,v)}| for every v, via one sort of u's row.
inline std::vector<std::size_t> strictly_closer_counts(const distance_matrix& dm, node_id u) {
    std::size_t n = dm.node_count();
    std::vector<distance> row(n);
    for (std::size_t v = 0; v < n; ++v) row[v] = dm(u, static_cast<node_id>(v));
    std::vector<distance> sorted = row;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> out(n);
    for (std::size_t v = 0; v < n; ++v)
        out[v] = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), row[v]) - sorted.begin());
    return out;
}

// Row-major n x n flags: far[u * n + v] iff v is eps-far from u.
inline std::vector<char> epsilon_far_matrix(const distance_matrix& dm, rational eps) {
    std::size_t n = dm.node_count();
    std::vector<char> far(n * n, 0);
    for (std::size_t u = 0; u < n; ++u) {
        auto counts = strictly_closer_counts(dm, static_cast<node_id>(u));
        for (std::size_t v = 0; v < n; ++v) far[u * n + v] = eps.count_reaches(counts[v], n) ? 1 : 0;
    }
    return far;
}

inline std::vector<std::pair<node_id, node_id>> epsilon_far_pairs(const distance_matrix& dm, rational eps) {
    std::size_t n = dm.node_count();
    auto far = epsilon_far_matrix(dm, eps);
    std::vector<std::pair<node_id, node_id>> out;
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = 0; v < n; ++v)
            if (far[u * n + v]) out.emplace_back(static_cast<node_id>(u), static_cast<node_id>(v));
    return out;
}

// Smallest attained distance r from u with |B(u, r)| >= eps * n.
inline distance r_epsilon(const distance_matrix& dm, node_id u, rational eps) {
    std::size_t n = dm.node_count();
    if (eps.num == 0 || eps.num > eps.den) throw error(error_kind::invalid_argument, "eps must lie in (0, 1]");
    std::vector<distance> row(n);
    for (std::size_t v = 0; v < n; ++v) row[v] = dm(u, static_cast<node_id>(v));
    std::sort(row.begin(), row.end());
    for (std::size_t j = 0; j < n; ++j) {
        // |B(u, row[j])| counts every tie at row[j].
        std::size_t ball = static_cast<std::size_t>(std::upper_bound(row.begin(), row.end(), row[j]) - row.begin());
        if (eps.count_reaches(ball, n)) return row[j];
    }
    return row.back();
}

}  // namespace dsketch::oracle
