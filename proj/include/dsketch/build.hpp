#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dsketch/bound_constants.hpp"
#include "dsketch/error.hpp"
#include "dsketch/gd_protocol.hpp"
#include "dsketch/oracle.hpp"
#include "dsketch/rational.hpp"
#include "dsketch/rng.hpp"
#include "dsketch/serialize.hpp"
#include "dsketch/slack_protocol.hpp"
#include "dsketch/stretch_report.hpp"
#include "dsketch/tz_protocol.hpp"

namespace dsketch {

struct build_config {
    scheme kind = scheme::tz;
    std::optional<std::uint32_t> k;
    std::optional<rational> eps;
    std::uint64_t seed = 1;
    termination_mode mode = termination_mode::fixed_s;
};

// tz needs k; slack3 needs eps; cdg needs both; gd takes neither.
inline void check_config(const build_config& c) {
    auto need = [&](bool has, const char* what) {
        if (!has) throw error(error_kind::invalid_argument, std::string(to_string(c.kind)) + " requires --" + what);
    };
    auto forbid = [&](bool has, const char* what) {
        if (has) throw error(error_kind::invalid_argument, std::string(to_string(c.kind)) + " does not take --" + what);
    };
    switch (c.kind) {
        case scheme::tz: need(c.k.has_value(), "k"); forbid(c.eps.has_value(), "eps"); break;
        case scheme::slack3: need(c.eps.has_value(), "eps"); forbid(c.k.has_value(), "k"); break;
        case scheme::cdg: need(c.k.has_value(), "k"); need(c.eps.has_value(), "eps"); break;
        case scheme::gd: forbid(c.k.has_value(), "k"); forbid(c.eps.has_value(), "eps"); break;
    }
    if (c.eps) check_eps(*c.eps);
}

struct built_sketches {
    sketch_set sketches;
    run_metrics metrics;
    std::size_t S = 0;
    termination_mode mode = termination_mode::fixed_s;
};

// S comes from the oracle in both modes so that budgets are auditable; only
// fixed_S hands it to the nodes.
inline built_sketches build_sketches(const graph& g, const oracle::distance_matrix& dm, const build_config& c) {
    check_config(c);
    built_sketches out;
    out.S = oracle::shortest_path_diameter(g);
    out.mode = c.mode;
    build_mode mode = c.mode == termination_mode::fixed_s ? build_mode::fixed(out.S) : build_mode::detect();
    rng r(c.seed);
    auto& s = out.sketches;
    s.kind = c.kind;
    switch (c.kind) {
        case scheme::tz: {
            s.k = *c.k;
            auto res = build_tz_sketches(g, *c.k, r, mode);
            s.tz = std::move(res.labels);
            out.metrics = std::move(res.metrics);
            break;
        }
        case scheme::slack3: {
            s.eps = *c.eps;
            auto res = build_slack3_sketches(g, build_density_net(dm, *c.eps, r.substream(1)), mode);
            s.slack3 = std::move(res.sketches);
            out.metrics = std::move(res.metrics);
            break;
        }
        case scheme::cdg: {
            s.k = *c.k;
            s.eps = *c.eps;
            auto res = build_cdg_sketches(g, dm, *c.eps, *c.k, r, mode);
            s.cdg = std::move(res.sketches);
            out.metrics = std::move(res.metrics);
            break;
        }
        case scheme::gd: {
            auto res = build_gd_sketches(g, dm, r, mode);
            s.gd = std::move(res.sketches);
            out.metrics = std::move(res.metrics);
            break;
        }
    }
    return out;
}

// The stretch guarantees each scheme promises, as exact integer ceilings.
struct declared_ceilings {
    std::optional<std::uint64_t> all_pairs;
    std::vector<slack_check> slack;
};

inline declared_ceilings ceilings_for(const sketch_set& s, std::size_t n) {
    declared_ceilings out;
    switch (s.kind) {
        case scheme::tz: out.all_pairs = 2 * std::uint64_t{s.k} - 1; break;
        case scheme::slack3: out.slack.push_back({s.eps, 3}); break;
        case scheme::cdg: out.slack.push_back({s.eps, 8 * std::uint64_t{s.k} - 1}); break;
        case scheme::gd:
            for (std::uint32_t i = 1; i <= gd_level_count(n); ++i)
                out.slack.push_back({rational(1, std::uint64_t{1} << i), 8 * std::uint64_t{gd_level_k(n, i)} - 1});
            break;
    }
    return out;
}

struct word_stats {
    std::size_t max = 0;
    double mean = 0;
};

inline word_stats sketch_words(const sketch_set& s) {
    word_stats w;
    std::size_t n = s.size();
    std::uint64_t total = 0;
    for (node_id u = 0; u < n; ++u) {
        w.max = std::max(w.max, s.words(u));
        total += s.words(u);
    }
    if (n > 0) w.mean = static_cast<double>(total) / static_cast<double>(n);
    return w;
}

// Round, data-message and size regressions against the frozen constants.
// Detect mode pays a constant factor on rounds and data for echo traffic.
inline std::vector<bounds::check> complexity_checks(const graph& g, const built_sketches& b) {
    namespace bd = bounds;
    double slow = b.mode == termination_mode::detect ? bd::detect_overhead : 1.0;
    std::size_t n = g.node_count();
    auto m = static_cast<double>(std::max<std::size_t>(g.edge_count(), 1));
    const auto& s = b.sketches;
    auto rounds = static_cast<double>(b.metrics.rounds());
    auto data = static_cast<double>(b.metrics.data_msgs());
    auto words = static_cast<double>(sketch_words(s).max);
    std::vector<bd::check> out;
    auto push = [&](double round_shape, double round_floor, double word_shape, double word_floor, double c_rounds,
                    double c_data, double c_words) {
        out.push_back({"rounds", rounds, round_shape, slow * c_rounds, slow * round_floor});
        out.push_back({"data_msgs", data, round_shape * m, slow * c_data, slow * 2 * m * round_floor});
        out.push_back({"sketch_words", words, word_shape, c_words, word_floor});
    };
    auto cdg_floor = [&](std::uint32_t k) { return (k + 2) * bd::phase_floor(b.S) + bd::full_label_words(n, k); };
    switch (s.kind) {
        case scheme::tz:
            push(bd::tz_round_shape(n, s.k, b.S), s.k * bd::phase_floor(b.S), bd::tz_word_shape(n, s.k),
                 bd::full_label_words(n, s.k), bd::tz_rounds, bd::tz_data, bd::tz_words);
            break;
        case scheme::slack3:
            // 2|N| + 1 with |N| <= (10/eps) ln n, exactly.
            push(bd::slack_round_shape(n, s.eps, b.S), bd::phase_floor(b.S), 2 * net_size_bound(n, s.eps) + 1, 3,
                 bd::slack3_rounds, bd::slack3_data, 1.0);
            break;
        case scheme::cdg:
            push(bd::cdg_round_shape(n, s.eps, s.k, b.S), cdg_floor(s.k), bd::cdg_word_shape(n, s.eps, s.k),
                 3 + bd::full_label_words(n, s.k), bd::cdg_rounds, bd::cdg_data, bd::cdg_words);
            break;
        case scheme::gd: {
            double round_floor = 0, word_floor = 1;
            for (std::uint32_t i = 1; i <= gd_level_count(n); ++i) {
                round_floor += cdg_floor(gd_level_k(n, i));
                word_floor += 5 + bd::full_label_words(n, gd_level_k(n, i));
            }
            push(bd::gd_round_shape(n, b.S), round_floor, bd::gd_word_shape(n), word_floor, bd::gd_rounds,
                 bd::gd_data, bd::gd_words);
            break;
        }
    }
    return out;
}

}  // namespace dsketch
