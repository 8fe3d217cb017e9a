#pragma once

#include <cstdint>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "dsketch/graph.hpp"
#include "dsketch/label.hpp"

namespace dsketch {

// Where an accepted announce came from, so it can be echoed later.
struct announce_origin {
    std::size_t port;
    distance dist;  // distance value carried by the received announce
};

// One node's state for one phase of the modified multi-source Bellman-Ford.
//
// The node participates for source v only while the candidate key
// (a + w, v) stays below `threshold` = (d(u, A_{i+1}), p_{i+1}(u)); each
// source has a 0/1 send queue, and one queued source is sent per round by a
// round-robin cursor over source IDs modulo n.
class bf_phase {
public:
    enum class verdict { rejected, accepted };

    struct receipt {
        verdict outcome;
        // Set when the accept replaced a queued, not yet sent, value.
        std::optional<announce_origin> superseded;
    };

    bf_phase() = default;
    bf_phase(node_id self, std::size_t n, dist_key threshold, bool is_source)
        : self_(self), n_(n), threshold_(threshold), source_(is_source) {
        if (source_) best_[self_] = 0;
    }

    bool is_source() const { return source_; }
    const dist_key& threshold() const { return threshold_; }

    receipt receive(node_id source, distance carried, distance edge_weight, std::size_t from_port) {
        distance cand = carried + edge_weight;
        if (!(dist_key{cand, source} < threshold_)) return {verdict::rejected, {}};
        auto it = best_.find(source);
        if (it != best_.end() && cand >= it->second) return {verdict::rejected, {}};
        best_[source] = cand;
        queued_.insert(source);
        receipt r{verdict::accepted, {}};
        if (auto o = origin_.find(source); o != origin_.end()) r.superseded = o->second;
        origin_[source] = {from_port, carried};
        return r;
    }

    // Advances the cursor exactly like `i <- (i+1) % n; while q(i) == 0 and
    // i != i': i <- (i+1) % n`, and dequeues the chosen source.
    struct send_item {
        node_id source;
        distance dist;
        std::optional<announce_origin> origin;
    };

    std::optional<send_item> next_to_send() {
        if (queued_.empty()) return std::nullopt;
        std::size_t start = (cursor_ + 1) % n_;
        auto it = queued_.lower_bound(static_cast<node_id>(start));
        if (it == queued_.end()) it = queued_.begin();
        node_id v = *it;
        queued_.erase(it);
        cursor_ = v;
        send_item item{v, best_.at(v), std::nullopt};
        if (auto o = origin_.find(v); o != origin_.end()) {
            item.origin = o->second;
            origin_.erase(o);
        }
        return item;
    }

    std::size_t nonempty_queues() const { return queued_.size(); }
    std::size_t cursor() const { return cursor_; }

    // Current estimate d'(v), infinite if never heard of.
    distance estimate(node_id v) const {
        auto it = best_.find(v);
        return it == best_.end() ? infinite_distance : it->second;
    }

    // B_i(u) once the phase has quiesced.
    std::vector<bunch_entry> bunch(std::uint32_t level) const {
        std::vector<bunch_entry> out;
        for (const auto& [v, d] : best_)
            if (dist_key{d, v} < threshold_) out.push_back({v, level, d});
        return out;
    }

private:
    node_id self_ = 0;
    std::size_t n_ = 1;
    dist_key threshold_ = infinite_key;
    bool source_ = false;
    std::size_t cursor_ = 0;
    std::map<node_id, distance> best_;
    std::set<node_id> queued_;
    std::map<node_id, announce_origin> origin_;
};

// Pivots and the next phase's threshold from what a node has learned so far:
// p_i(u) is the minimal (distance, ID) bunch entry at level >= i, because
// p_i(u) always lies in B_j(u) for j = level(p_i(u)).
inline dist_key min_key_at_or_above(const std::vector<bunch_entry>& bunch, std::uint32_t level) {
    dist_key best = infinite_key;
    for (const auto& e : bunch)
        if (e.level >= level) best = std::min(best, dist_key{e.dist, e.node});
    return best;
}

inline tz_label assemble_label(node_id owner, std::uint32_t k, std::vector<bunch_entry> bunch) {
    tz_label label;
    label.owner = owner;
    label.k = k;
    sort_bunch(bunch);
    for (std::uint32_t i = 0; i < k; ++i) {
        auto key = min_key_at_or_above(bunch, i);
        label.pivots.push_back({key.node, key.dist});
    }
    label.bunch = std::move(bunch);
    return label;
}

}  // namespace dsketch
