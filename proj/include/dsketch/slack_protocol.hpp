#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dsketch/congest.hpp"
#include "dsketch/envelope.hpp"
#include "dsketch/error.hpp"
#include "dsketch/graph.hpp"
#include "dsketch/hierarchy.hpp"
#include "dsketch/label.hpp"
#include "dsketch/metrics.hpp"
#include "dsketch/oracle.hpp"
#include "dsketch/rational.hpp"
#include "dsketch/rng.hpp"
#include "dsketch/tz_protocol.hpp"

namespace dsketch {

struct density_net {
    rational eps;
    std::vector<node_id> members;  // ascending

    bool contains(node_id v) const { return std::binary_search(members.begin(), members.end(), v); }
    std::vector<char> mask(std::size_t n) const {
        std::vector<char> m(n, 0);
        for (auto v : members) m[v] = 1;
        return m;
    }

    friend bool operator==(const density_net&, const density_net&) = default;
};

inline constexpr int net_retry_budget = 64;

inline void check_eps(rational eps) {
    if (eps.num == 0 || eps.num > eps.den) throw error(error_kind::invalid_argument, "eps must lie in (0, 1]");
}

inline double net_join_probability(std::size_t n, rational eps) {
    if (n <= 1) return 1.0;
    double dn = static_cast<double>(n);
    return std::min(1.0, 5.0 * std::log(dn) / (eps.value() * dn));
}

// (10 / eps) ln n
inline double net_size_bound(std::size_t n, rational eps) {
    return 10.0 * std::log(static_cast<double>(std::max<std::size_t>(n, 1))) / eps.value();
}

// Both defining properties, checked exactly. A single node is its own net
// even though the size bound degenerates to zero there.
inline bool is_density_net(const oracle::distance_matrix& dm, const density_net& net) {
    std::size_t n = dm.node_count();
    if (net.members.empty()) return false;
    if (n > 1 && static_cast<double>(net.members.size()) > net_size_bound(n, net.eps)) return false;
    for (node_id u = 0; u < n; ++u) {
        distance nearest = infinite_distance;
        for (auto v : net.members) nearest = std::min(nearest, dm(u, v));
        if (nearest > oracle::r_epsilon(dm, u, net.eps)) return false;
    }
    return true;
}

// Local coin flips (no rounds); redrawn on the next substream until the
// result is verified as a density net.
inline density_net build_density_net(const oracle::distance_matrix& dm, rational eps, const rng& r) {
    check_eps(eps);
    std::size_t n = dm.node_count();
    double p = net_join_probability(n, eps);
    for (int attempt = 0; attempt < net_retry_budget; ++attempt) {
        rng draw = r.substream(static_cast<std::uint64_t>(attempt));
        density_net net{eps, {}};
        for (std::size_t u = 0; u < n; ++u)
            if (draw.coin(p)) net.members.push_back(static_cast<node_id>(u));
        if (is_density_net(dm, net)) return net;
    }
    throw error(error_kind::retry_budget, "retry budget exhausted");
}

struct slack3_sketch {
    node_id owner = no_node;
    std::vector<std::pair<node_id, distance>> table;  // sorted by net member

    std::size_t words() const { return 2 * table.size() + 1; }

    friend bool operator==(const slack3_sketch&, const slack3_sketch&) = default;
};

struct slack3_build_result {
    std::vector<slack3_sketch> sketches;
    run_metrics metrics;
    density_net net;
};

// Multi-source Bellman-Ford from every net member: the k = 1 TZ phase with
// the net as the only level.
inline slack3_build_result build_slack3_sketches(const graph& g, const density_net& net, build_mode mode) {
    std::size_t n = g.node_count();
    level_assignment levels{1, std::vector<std::int32_t>(n, -1)};
    for (auto v : net.members) levels.level[v] = 0;
    auto tz = run_tz_protocol(g, levels, mode, net_size_bound(n, net.eps), "slack3-");
    slack3_build_result out{{}, std::move(tz.metrics), net};
    for (const auto& label : tz.labels) {
        slack3_sketch s{label.owner, {}};
        for (const auto& e : label.bunch) s.table.emplace_back(e.node, e.dist);
        out.sketches.push_back(std::move(s));
    }
    return out;
}

struct cdg_sketch {
    node_id owner = no_node;
    node_id nearest = no_node;
    distance dist = infinite_distance;
    tz_label net_label;

    std::size_t words() const { return 3 + net_label.words(); }

    friend bool operator==(const cdg_sketch&, const cdg_sketch&) = default;
};

inline std::uint32_t cdg_max_k(std::size_t n, rational eps) {
    double x = net_size_bound(n, eps);
    if (x <= 2.0) return 1;
    return static_cast<std::uint32_t>(std::ceil(std::log2(x)));
}

// ((10/eps) ln n)^{1/k} ln n: expected per-level bunch size over the net.
inline double cdg_bunch_bound(std::size_t n, rational eps, std::uint32_t k) {
    double ln = std::log(static_cast<double>(std::max<std::size_t>(n, 2)));
    return std::pow(std::max(net_size_bound(n, eps), 1.0), 1.0 / k) * ln;
}

// Flattened label as streamed during adoption: the word count first, then
// owner, k, pivots, bunch size and bunch entries.
inline std::vector<std::uint64_t> label_to_words(const tz_label& l) {
    std::vector<std::uint64_t> w{0, l.owner, l.k};
    for (const auto& p : l.pivots) {
        w.push_back(p.node);
        w.push_back(p.dist);
    }
    w.push_back(l.bunch.size());
    for (const auto& e : l.bunch) {
        w.push_back(e.node);
        w.push_back(e.level);
        w.push_back(e.dist);
    }
    w[0] = w.size() - 1;
    return w;
}

inline tz_label label_from_words(const std::vector<std::uint64_t>& w) {
    auto fail = [] { return error(error_kind::parse, "malformed streamed label"); };
    if (w.size() < 4 || w[0] != w.size() - 1) throw fail();
    tz_label l;
    l.owner = static_cast<node_id>(w[1]);
    l.k = static_cast<std::uint32_t>(w[2]);
    std::size_t at = 3;
    if (w.size() < at + 2 * std::size_t{l.k} + 1) throw fail();
    for (std::uint32_t i = 0; i < l.k; ++i, at += 2) l.pivots.push_back({static_cast<node_id>(w[at]), w[at + 1]});
    std::uint64_t count = w[at++];
    if (w.size() != at + 3 * count) throw fail();
    for (std::uint64_t j = 0; j < count; ++j, at += 3)
        l.bunch.push_back({static_cast<node_id>(w[at]), static_cast<std::uint32_t>(w[at + 1]), w[at + 2]});
    return l;
}

// One Bellman-Ford over the "super node" formed by the whole net: each node
// keeps the (distance, ID)-least net member seen and the port it came from.
class nearest_net_node {
public:
    nearest_net_node(node_id self, std::span<const port> ports, bool member) : self_(self), ports_(ports), member_(member) {}

    void on_round(std::uint64_t round, std::span<const congest::inbound> inbox, congest::outbox& out) {
        if (round == 1 && member_) {
            best_ = {0, self_};
            dirty_ = true;
        }
        for (const auto& in : inbox) {
            const auto& a = std::get<announce>(in.msg);
            dist_key cand{a.dist + ports_[in.port].weight, a.source};
            if (cand < best_) {
                best_ = cand;
                parent_ = in.port;
                dirty_ = true;
            }
        }
        if (dirty_) out.broadcast(announce{best_.node, best_.dist});
        dirty_ = false;
    }

    bool quiescent() const { return !dirty_; }
    dist_key best() const { return best_; }
    std::optional<std::size_t> parent_port() const { return parent_; }

private:
    node_id self_;
    std::span<const port> ports_;
    bool member_;
    dist_key best_ = infinite_key;
    std::optional<std::size_t> parent_;
    bool dirty_ = false;
};

// Label adoption: a net member that is its own nearest member streams its
// label one word per round; everyone else relays what arrives on the port
// its nearest-member distance came from and ignores all other ports.
class label_stream_node {
public:
    label_stream_node(std::optional<std::size_t> parent, std::vector<std::uint64_t> own_words)
        : parent_(parent), words_(std::move(own_words)) {}

    void on_round(std::uint64_t round, std::span<const congest::inbound> inbox, congest::outbox& out) {
        if (!parent_) {
            if (round <= words_.size()) {
                auto j = static_cast<std::uint32_t>(round - 1);
                out.broadcast(label_word{j, words_[j]});
            }
            return;
        }
        for (const auto& in : inbox) {
            if (in.port != *parent_) continue;
            const auto& w = std::get<label_word>(in.msg);
            if (w.index == 0) words_.assign(static_cast<std::size_t>(w.value) + 1, 0);
            if (w.index >= words_.size()) throw std::logic_error("label word out of order");
            words_[w.index] = w.value;
            ++received_;
            relay_.push_back(w);
        }
        if (!relay_.empty()) {
            for (std::size_t p = 0; p < out.degree(); ++p)
                if (p != *parent_) out.send(p, relay_.front());
            relay_.pop_front();
        }
    }

    bool quiescent() const { return relay_.empty(); }
    bool done() const { return !parent_ || (!words_.empty() && received_ == words_.size()); }
    const std::vector<std::uint64_t>& words() const { return words_; }

private:
    std::optional<std::size_t> parent_;
    std::vector<std::uint64_t> words_;
    std::size_t received_ = 0;
    std::deque<label_word> relay_;
};

struct cdg_build_result {
    std::vector<cdg_sketch> sketches;
    run_metrics metrics;
    density_net net;
    level_assignment levels;  // over net members; -1 elsewhere
};

// Round cap for the two auxiliary passes, which always stop at quiescence.
inline std::uint64_t auxiliary_limit(std::size_t n, build_mode mode, double per_hop) {
    std::size_t s = mode.kind == termination_mode::fixed_s ? mode.S : n;
    return phase_budget(n, s, per_hop) + static_cast<std::uint64_t>(std::ceil(per_hop));
}

inline cdg_build_result build_cdg_sketches(const graph& g, const density_net& net, std::uint32_t k, const rng& r, build_mode mode,
                                           const std::string& prefix = "cdg-") {
    std::size_t n = g.node_count();
    std::uint32_t cap = cdg_max_k(n, net.eps);
    if (k < 1 || k > cap)
        throw error(error_kind::invalid_argument,
                    "k must lie in [1, " + std::to_string(cap) + "] for n = " + std::to_string(n) +
                        ", eps = " + net.eps.str());
    cdg_build_result out;
    out.net = net;
    auto mask = net.mask(n);

    // (a) nearest net member
    auto nearest = congest::run(
        g, [&](node_id u, std::span<const port> ps) { return nearest_net_node(u, ps, mask[u] != 0); },
        auxiliary_limit(n, mode, 1.0), "nearest");
    out.metrics.absorb(nearest.metrics, prefix);

    // (b) TZ over the net, non-members relaying
    double keep = std::pow(std::max(net_size_bound(n, net.eps), 1.0), -1.0 / static_cast<double>(k));
    out.levels = sample_levels(mask, k, keep, r);
    auto tz = run_tz_protocol(g, out.levels, mode, cdg_bunch_bound(n, net.eps, k), "");
    out.metrics.absorb(tz.metrics, prefix + "tz-");

    // (c) label adoption
    double max_words = 2.0 + 2.0 * k + 3.0 * k * cdg_bunch_bound(n, net.eps, k) + 1.0;
    auto adopt = congest::run(
        g,
        [&](node_id u, std::span<const port> ps) {
            (void)ps;
            const auto& nn = nearest.nodes[u];
            if (nn.best().node == u) return label_stream_node(std::nullopt, label_to_words(tz.labels[u]));
            return label_stream_node(nn.parent_port(), {});
        },
        auxiliary_limit(n, mode, max_words), "adopt");
    out.metrics.absorb(adopt.metrics, prefix);

    for (node_id u = 0; u < n; ++u) {
        const auto& stream = adopt.nodes[u];
        if (!stream.done()) throw std::logic_error("label adoption did not complete");
        cdg_sketch s;
        s.owner = u;
        s.nearest = nearest.nodes[u].best().node;
        s.dist = nearest.nodes[u].best().dist;
        s.net_label = label_from_words(stream.words());
        if (s.net_label.owner != s.nearest) throw std::logic_error("adopted label of the wrong net member");
        out.sketches.push_back(std::move(s));
    }
    return out;
}

inline cdg_build_result build_cdg_sketches(const graph& g, const oracle::distance_matrix& dm, rational eps,
                                           std::uint32_t k, const rng& r, build_mode mode,
                                           const std::string& prefix = "cdg-") {
    auto net = build_density_net(dm, eps, r.substream(1));
    return build_cdg_sketches(g, net, k, r.substream(2), mode, prefix);
}

}  // namespace dsketch
