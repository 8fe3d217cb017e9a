#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dsketch/graph.hpp"
#include "dsketch/metrics.hpp"
#include "dsketch/oracle.hpp"
#include "dsketch/rational.hpp"
#include "dsketch/rng.hpp"
#include "dsketch/slack_protocol.hpp"

namespace dsketch {

struct gd_level {
    std::uint32_t i = 0;  // eps = 2^-i
    std::uint32_t k = 0;
    cdg_sketch sketch;

    rational eps() const { return rational(1, std::uint64_t{1} << i); }

    friend bool operator==(const gd_level&, const gd_level&) = default;
};

struct gd_sketch {
    node_id owner = no_node;
    std::vector<gd_level> levels;

    std::size_t words() const {
        std::size_t w = 1;
        for (const auto& l : levels) w += 2 + l.sketch.words();
        return w;
    }

    friend bool operator==(const gd_sketch&, const gd_sketch&) = default;
};

inline std::uint32_t gd_level_count(std::size_t n) { return std::max<std::uint32_t>(1, ceil_log2(n)); }

// k_i = max(1, min(i, ceil(log2((10 / eps_i) ln n))))
inline std::uint32_t gd_level_k(std::size_t n, std::uint32_t i) {
    return std::max<std::uint32_t>(1, std::min(i, cdg_max_k(n, rational(1, std::uint64_t{1} << i))));
}

struct gd_build_result {
    std::vector<gd_sketch> sketches;
    run_metrics metrics;
    std::vector<cdg_build_result> per_level;
};

// The CDG constructions for eps = 1/2, 1/4, ... run back to back; level i
// draws from substream i of `r`.
inline gd_build_result build_gd_sketches(const graph& g, const oracle::distance_matrix& dm, const rng& r,
                                         build_mode mode) {
    std::size_t n = g.node_count();
    gd_build_result out;
    out.sketches.resize(n);
    for (node_id u = 0; u < n; ++u) out.sketches[u].owner = u;
    for (std::uint32_t i = 1; i <= gd_level_count(n); ++i) {
        std::uint32_t k = gd_level_k(n, i);
        auto level = build_cdg_sketches(g, dm, rational(1, std::uint64_t{1} << i), k, r.substream(i), mode,
                                        "gd-" + std::to_string(i) + "-");
        out.metrics.absorb(level.metrics);
        for (node_id u = 0; u < n; ++u) out.sketches[u].levels.push_back({i, k, level.sketches[u]});
        out.per_level.push_back(std::move(level));
    }
    return out;
}

}  // namespace dsketch
