#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dsketch/error.hpp"
#include "dsketch/graph.hpp"
#include "dsketch/oracle.hpp"
#include "dsketch/rational.hpp"
#include "dsketch/rng.hpp"

namespace dsketch {

using estimator = std::function<distance(node_id, node_id)>;

struct pair_policy {
    bool all = true;
    std::size_t sample = 0;

    static pair_policy parse(const std::string& text) {
        if (text == "all") return {};
        const std::string tag = "sample:";
        if (text.rfind(tag, 0) == 0) {
            auto m = parse_rational(text.substr(tag.size()));
            if (m.den != 1 || m.num == 0) throw error(error_kind::parse, "bad pair policy '" + text + "'");
            return {false, static_cast<std::size_t>(m.num)};
        }
        throw error(error_kind::parse, "bad pair policy '" + text + "' (expected all or sample:m)");
    }

    std::string str() const { return all ? "all" : "sample:" + std::to_string(sample); }
};

// Estimate over truth; 1 when both are zero, infinite when only truth is.
inline double stretch_ratio(distance estimate, distance truth) {
    if (truth == 0) return estimate == 0 ? 1.0 : std::numeric_limits<double>::infinity();
    return static_cast<double>(estimate) / static_cast<double>(truth);
}

// estimate <= c * truth, exactly.
inline bool within(distance estimate, distance truth, std::uint64_t c) {
    return static_cast<unsigned __int128>(estimate) <= static_cast<unsigned __int128>(truth) * c;
}

struct pair_stretch {
    node_id u;
    node_id v;
    distance truth;
    distance estimate;  // estimator(u, v)
    distance reverse;   // estimator(v, u)

    double ratio() const { return stretch_ratio(estimate, truth); }
};

// A ceiling that must hold for ordered pairs (u, v) with v eps-far from u.
struct slack_check {
    rational eps;
    std::uint64_t ceiling;
};

struct slack_stats {
    rational eps;
    std::uint64_t ceiling = 0;
    std::size_t far_pairs = 0;  // ordered
    double far_max = 1.0;
    std::size_t violations = 0;
    std::size_t near_pairs = 0;  // ordered, unconstrained
    double near_max = 1.0;
};

struct stretch_report {
    std::vector<pair_stretch> pairs;  // unordered, u < v
    double max_stretch = 1.0;
    double avg_stretch = 1.0;
    std::size_t below_truth = 0;  // ordered pairs with estimate < d
    std::size_t asymmetric = 0;
    std::optional<std::uint64_t> ceiling;  // over all pairs
    std::size_t ceiling_violations = 0;
    std::vector<slack_stats> slack_view;

    bool passed() const {
        if (below_truth > 0 || ceiling_violations > 0) return false;
        return std::all_of(slack_view.begin(), slack_view.end(), [](const slack_stats& s) { return s.violations == 0; });
    }
};

inline std::vector<std::pair<node_id, node_id>> select_pairs(std::size_t n, const pair_policy& policy, const rng& r) {
    std::vector<std::pair<node_id, node_id>> out;
    std::size_t total = n * (n - 1) / 2;
    if (policy.all || policy.sample >= total) {
        for (node_id u = 0; u < n; ++u)
            for (node_id v = u + 1; v < n; ++v) out.emplace_back(u, v);
        return out;
    }
    rng draw = r.substream(0x9a12);
    std::set<std::pair<node_id, node_id>> chosen;
    while (chosen.size() < policy.sample) {
        auto a = static_cast<node_id>(draw.uniform(0, n - 1));
        auto b = static_cast<node_id>(draw.uniform(0, n - 1));
        if (a == b) continue;
        chosen.emplace(std::min(a, b), std::max(a, b));
    }
    return {chosen.begin(), chosen.end()};
}

inline stretch_report make_stretch_report(const oracle::distance_matrix& dm, const estimator& est,
                                          const pair_policy& policy, const rng& r,
                                          std::optional<std::uint64_t> ceiling = std::nullopt,
                                          const std::vector<slack_check>& checks = {}) {
    std::size_t n = dm.node_count();
    stretch_report rep;
    rep.ceiling = ceiling;
    for (auto [u, v] : select_pairs(n, policy, r)) rep.pairs.push_back({u, v, dm(u, v), est(u, v), est(v, u)});

    double sum = 0.0;
    for (const auto& p : rep.pairs) {
        rep.max_stretch = std::max({rep.max_stretch, p.ratio(), stretch_ratio(p.reverse, p.truth)});
        sum += p.ratio();
        rep.below_truth += (p.estimate < p.truth) + (p.reverse < p.truth);
        rep.asymmetric += p.estimate != p.reverse;
        if (ceiling) rep.ceiling_violations += !within(p.estimate, p.truth, *ceiling) + !within(p.reverse, p.truth, *ceiling);
    }
    if (!rep.pairs.empty()) rep.avg_stretch = sum / static_cast<double>(rep.pairs.size());

    for (const auto& c : checks) {
        auto far = oracle::epsilon_far_matrix(dm, c.eps);
        slack_stats s{c.eps, c.ceiling};
        auto visit = [&](node_id a, node_id b, distance e, distance d) {
            double ratio = stretch_ratio(e, d);
            if (far[static_cast<std::size_t>(a) * n + b]) {
                ++s.far_pairs;
                s.far_max = std::max(s.far_max, ratio);
                s.violations += !within(e, d, c.ceiling);
            } else {
                ++s.near_pairs;
                s.near_max = std::max(s.near_max, ratio);
            }
        };
        for (const auto& p : rep.pairs) {
            visit(p.u, p.v, p.estimate, p.truth);
            visit(p.v, p.u, p.reverse, p.truth);
        }
        rep.slack_view.push_back(s);
    }
    return rep;
}

inline void write_pairs_csv(std::ostream& os, const stretch_report& rep) {
    os << "u,v,distance,estimate,ratio\n";
    for (const auto& p : rep.pairs) os << p.u << ',' << p.v << ',' << p.truth << ',' << p.estimate << ',' << p.ratio() << '\n';
}

}  // namespace dsketch
