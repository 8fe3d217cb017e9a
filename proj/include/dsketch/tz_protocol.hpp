#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dsketch/bellman_ford.hpp"
#include "dsketch/congest.hpp"
#include "dsketch/envelope.hpp"
#include "dsketch/graph.hpp"
#include "dsketch/hierarchy.hpp"
#include "dsketch/label.hpp"
#include "dsketch/metrics.hpp"
#include "dsketch/rng.hpp"
#include "dsketch/termination.hpp"

namespace dsketch {

enum class termination_mode { fixed_s, detect };

struct build_mode {
    termination_mode kind = termination_mode::fixed_s;
    // Shortest-path diameter every node is assumed to know (fixed_s only).
    std::size_t S = 0;

    static build_mode fixed(std::size_t s) { return {termination_mode::fixed_s, s}; }
    static build_mode detect() { return {termination_mode::detect, 0}; }
};

inline const char* to_string(termination_mode m) { return m == termination_mode::fixed_s ? "fixed_S" : "detect"; }

// Rounds granted to one phase when every node knows S: the bunch-size bound
// times S with factor 4, plus n rounds of slack for queueing delay.
inline std::uint64_t phase_budget(std::size_t n, std::size_t S, double bunch_bound) {
    auto per_hop = static_cast<std::uint64_t>(std::ceil(bunch_bound));
    return 4 * per_hop * static_cast<std::uint64_t>(S) + static_cast<std::uint64_t>(n);
}

inline double tz_bunch_bound(std::size_t n, std::uint32_t k) {
    double dn = static_cast<double>(n);
    return std::pow(dn, 1.0 / k) * std::log(dn);
}

// Fixed-S mode: one process per node per phase; the phase ends after its
// round budget, which the simulator shortcuts once the network is silent.
class tz_phase_node {
public:
    tz_phase_node(node_id self, std::span<const port> ports, std::size_t n, dist_key threshold, bool is_source)
        : self_(self), ports_(ports), phase_(self, n, threshold, is_source) {}

    void on_round(std::uint64_t round, std::span<const congest::inbound> inbox, congest::outbox& out) {
        for (const auto& in : inbox) {
            const auto* a = std::get_if<announce>(&in.msg);
            if (!a) throw std::logic_error("unexpected envelope in a Bellman-Ford phase");
            phase_.receive(a->source, a->dist, ports_[in.port].weight, in.port);
        }
        if (round == 1 && phase_.is_source()) {
            out.broadcast(announce{self_, 0});
            return;
        }
        if (auto item = phase_.next_to_send()) out.broadcast(announce{item->source, item->dist});
    }

    bool quiescent() const { return phase_.nonempty_queues() == 0; }
    std::size_t nonempty_queues() const { return phase_.nonempty_queues(); }
    const bf_phase& state() const { return phase_; }

private:
    node_id self_;
    std::span<const port> ports_;
    bf_phase phase_;
};

// Detect mode: all phases inside one run. Every received announce is echoed
// exactly once (immediately if it was rejected or superseded, otherwise once
// the announce it caused has been echoed by every neighbor). A phase source
// is complete when its own announce is fully echoed; COMPLETE climbs the BFS
// tree, and the root answers with START(next phase, start round) downwards.
// Control traffic goes first: a node with any queued control envelope sends
// those and holds its announce for a later round. Echo backlog then never
// outlives the data, so detection trails quiescence by about two tree depths.
class tz_detect_node {
public:
    static constexpr std::uint32_t finished_phase = std::numeric_limits<std::uint32_t>::max();

    struct tree_links {
        std::optional<std::size_t> parent_port;
        std::vector<std::size_t> child_ports;
        std::uint32_t height = 0;  // only the root uses it
    };

    struct phase_record {
        std::uint32_t phase;
        std::uint64_t start_round;
        std::uint64_t detected_round = 0;
    };

    tz_detect_node(node_id self, std::span<const port> ports, std::size_t n, std::uint32_t k, std::int32_t level,
                   tree_links links)
        : self_(self), ports_(ports), n_(n), k_(k), level_(level), links_(std::move(links)),
          control_(ports.size()), pending_start_(start{k - 1, 1}) {}

    void on_round(std::uint64_t round, std::span<const congest::inbound> inbox, congest::outbox& out) {
        if (pending_start_) {
            if (round > pending_start_->at_round) throw std::logic_error("START arrived after its start round");
            if (round == pending_start_->at_round) begin(pending_start_->phase, round);
        }
        for (const auto& in : inbox) receive(in, round);

        check_complete(round);
        bool sent_control = false;
        for (std::size_t p = 0; p < control_.size(); ++p) {
            if (control_[p].empty()) continue;
            out.send(p, control_[p].front());
            control_[p].pop_front();
            sent_control = true;
        }
        if (active_ && !sent_control) {
            if (source_pending_) {
                source_pending_ = false;
                out.broadcast(announce{self_, 0});
                track_send(self_, 0, std::nullopt);
            } else if (auto item = phase_.next_to_send()) {
                out.broadcast(announce{item->source, item->dist});
                track_send(item->source, item->dist, item->origin);
            }
        }
        check_complete(round);
    }

    bool quiescent() const {
        if (!finished_) return false;
        for (const auto& q : control_)
            if (!q.empty()) return false;
        return true;
    }

    std::size_t nonempty_queues() const { return active_ ? phase_.nonempty_queues() : 0; }

    tz_label label() const { return assemble_label(self_, k_, bunch_); }
    const std::vector<phase_record>& phase_log() const { return log_; }
    std::uint64_t finish_round() const { return finish_round_; }

private:
    struct pending_echo {
        std::size_t remaining;
        std::optional<announce_origin> origin;
    };

    void begin(std::uint32_t phase, std::uint64_t round) {
        if (active_) {
            auto learned = phase_.bunch(current_);
            bunch_.insert(bunch_.end(), learned.begin(), learned.end());
            active_ = false;
        }
        pending_start_.reset();
        if (phase == finished_phase) {
            finished_ = true;
            finish_round_ = round;
            return;
        }
        current_ = phase;
        phase_start_ = round;
        phase_ = bf_phase(self_, n_, min_key_at_or_above(bunch_, phase + 1), level_ == static_cast<std::int32_t>(phase));
        source_complete_ = !phase_.is_source();
        source_pending_ = phase_.is_source();
        children_complete_ = 0;
        complete_sent_ = false;
        active_ = true;
        log_.push_back({phase, round});
    }

    void receive(const congest::inbound& in, std::uint64_t round) {
        if (const auto* a = std::get_if<announce>(&in.msg)) {
            if (!active_) throw std::logic_error("announce outside an active phase");
            auto r = phase_.receive(a->source, a->dist, ports_[in.port].weight, in.port);
            if (r.outcome == bf_phase::verdict::rejected) control_[in.port].push_back(echo{a->source, a->dist});
            else if (r.superseded) control_[r.superseded->port].push_back(echo{a->source, r.superseded->dist});
        } else if (const auto* e = std::get_if<echo>(&in.msg)) {
            auto it = outstanding_.find({e->source, e->dist});
            if (it == outstanding_.end()) throw std::logic_error("echo for an announce that was never sent");
            if (--it->second.remaining == 0) {
                if (it->second.origin) control_[it->second.origin->port].push_back(echo{e->source, it->second.origin->dist});
                else source_complete_ = true;
                outstanding_.erase(it);
            }
        } else if (std::holds_alternative<complete>(in.msg)) {
            ++children_complete_;
        } else if (const auto* s = std::get_if<start>(&in.msg)) {
            if (s->at_round <= round) throw std::logic_error("START arrived too late");
            for (auto c : links_.child_ports) control_[c].push_back(*s);
            pending_start_ = *s;
        } else {
            throw std::logic_error("unexpected envelope in the TZ protocol");
        }
    }

    void track_send(node_id source, distance dist, std::optional<announce_origin> origin) {
        if (ports_.empty()) {
            if (!origin) source_complete_ = true;
            return;
        }
        outstanding_[{source, dist}] = {ports_.size(), origin};
    }

    void check_complete(std::uint64_t round) {
        if (!active_ || complete_sent_ || !source_complete_ || children_complete_ != links_.child_ports.size())
            return;
        complete_sent_ = true;
        if (links_.parent_port) {
            control_[*links_.parent_port].push_back(complete{});
            return;
        }
        // Root: the whole phase has quiesced.
        log_.back().detected_round = round;
        start next{current_ == 0 ? finished_phase : current_ - 1, round + links_.height + 1};
        for (auto c : links_.child_ports) control_[c].push_back(next);
        pending_start_ = next;
    }

    node_id self_;
    std::span<const port> ports_;
    std::size_t n_;
    std::uint32_t k_;
    std::int32_t level_;
    tree_links links_;

    std::vector<std::deque<envelope>> control_;
    std::optional<start> pending_start_;
    bool active_ = false;
    bool finished_ = false;
    std::uint32_t current_ = 0;
    std::uint64_t phase_start_ = 0;
    std::uint64_t finish_round_ = 0;
    bf_phase phase_;
    bool source_complete_ = true;
    bool source_pending_ = false;
    std::size_t children_complete_ = 0;
    bool complete_sent_ = false;
    std::map<std::pair<node_id, distance>, pending_echo> outstanding_;
    std::vector<bunch_entry> bunch_;
    std::vector<phase_record> log_;
};

struct tz_build_result {
    std::vector<tz_label> labels;
    run_metrics metrics;
    level_assignment levels;
};

namespace detail {

inline tz_build_result run_fixed(const graph& g, const level_assignment& levels, std::size_t S, double bunch_bound,
                                 const std::string& prefix) {
    std::size_t n = g.node_count();
    std::uint32_t k = levels.k;
    std::uint64_t budget = phase_budget(n, S, bunch_bound);
    std::vector<std::vector<bunch_entry>> known(n);
    tz_build_result out;
    out.levels = levels;
    for (std::uint32_t i = k; i-- > 0;) {
        auto res = congest::run(
            g,
            [&](node_id u, std::span<const port> ports) {
                return tz_phase_node(u, ports, n, min_key_at_or_above(known[u], i + 1),
                                     levels.level[u] == static_cast<std::int32_t>(i));
            },
            budget, prefix + "phase-" + std::to_string(i));
        phase_metrics pm = res.metrics.per_phase().front();
        pm.budget = budget;
        out.metrics.add_phase(pm);
        out.metrics.note_queue_depth(res.metrics.max_nonempty_queues());
        for (std::size_t u = 0; u < n; ++u) {
            auto learned = res.nodes[u].state().bunch(i);
            known[u].insert(known[u].end(), learned.begin(), learned.end());
        }
    }
    for (std::size_t u = 0; u < n; ++u) out.labels.push_back(assemble_label(static_cast<node_id>(u), k, known[u]));
    return out;
}

inline tz_build_result run_detect(const graph& g, const level_assignment& levels, double bunch_bound,
                                  const std::string& prefix) {
    std::size_t n = g.node_count();
    std::uint32_t k = levels.k;
    auto tree = termination_overlay(g, 0);
    // Generous cap: four phase budgets per phase with S = n, plus tree traffic.
    std::uint64_t limit = 4 * k * phase_budget(n, n, bunch_bound) + 8 * (k + 1) * (tree.height + 2);
    auto res = congest::run(
        g,
        [&](node_id u, std::span<const port> ports) {
            tz_detect_node::tree_links links;
            auto port_to = [&](node_id v) {
                for (std::size_t p = 0; p < ports.size(); ++p)
                    if (ports[p].neighbor == v) return p;
                throw std::logic_error("tree edge missing from graph");
            };
            if (tree.parent[u] != no_node) links.parent_port = port_to(tree.parent[u]);
            for (auto c : tree.children[u]) links.child_ports.push_back(port_to(c));
            links.height = tree.height;
            return tz_detect_node(u, ports, n, k, levels.level[u], std::move(links));
        },
        limit, prefix + "detect");

    tz_build_result out;
    out.levels = levels;
    const auto& root = res.nodes[tree.root];
    const auto& log = root.phase_log();
    std::uint64_t end_round = res.metrics.rounds();
    for (std::size_t j = 0; j < log.size(); ++j) {
        std::uint64_t first = log[j].start_round;
        std::uint64_t last = j + 1 < log.size() ? log[j + 1].start_round - 1 : end_round;
        phase_metrics pm;
        pm.id = prefix + "phase-" + std::to_string(log[j].phase);
        pm.rounds = last - first + 1;
        std::uint64_t last_data = 0;
        for (std::uint64_t r = first; r <= last; ++r) {
            const auto& t = res.traffic[r - 1];
            pm.messages += t;
            if (t.data() > 0) last_data = r;
        }
        pm.quiescent_at = last_data == 0 ? 1 : last_data - first + 2;
        pm.detected_at = log[j].detected_round - first + 1;
        out.metrics.add_phase(pm);
    }
    out.metrics.note_queue_depth(res.metrics.max_nonempty_queues());
    for (const auto& node : res.nodes) out.labels.push_back(node.label());
    return out;
}

}  // namespace detail

// Runs phases k-1 down to 0 of the distributed construction for the given
// hierarchy. Phase k-1 is plain multi-source Bellman-Ford (the threshold is
// infinite there). `bunch_bound` sizes the fixed-S round budget.
inline tz_build_result run_tz_protocol(const graph& g, const level_assignment& levels, build_mode mode,
                                       double bunch_bound, const std::string& prefix = "tz-") {
    if (levels.node_count() != g.node_count()) throw error(error_kind::invalid_argument, "level assignment size mismatch");
    if (levels.has_empty_level()) throw error(error_kind::invalid_argument, "empty level");
    if (mode.kind == termination_mode::fixed_s) return detail::run_fixed(g, levels, mode.S, bunch_bound, prefix);
    return detail::run_detect(g, levels, bunch_bound, prefix);
}

inline tz_build_result build_tz_sketches(const graph& g, std::uint32_t k, const rng& r, build_mode mode) {
    auto levels = sample_hierarchy(g.node_count(), k, r);
    return run_tz_protocol(g, levels, mode, tz_bunch_bound(g.node_count(), k));
}

}  // namespace dsketch
