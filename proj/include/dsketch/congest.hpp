#pragma once

#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "dsketch/envelope.hpp"
#include "dsketch/error.hpp"
#include "dsketch/graph.hpp"
#include "dsketch/metrics.hpp"

// Synchronous CONGEST executor. In every round each node reads the envelopes
// its neighbors sent in the previous round and may place at most one
// envelope on each incident edge. Nodes and their ports are visited in
// ascending ID order, so a run is a pure function of its inputs.
namespace dsketch::congest {

struct inbound {
    std::size_t port;  // index into graph::ports(receiver)
    envelope msg;
};

class outbox {
public:
    explicit outbox(std::size_t degree) : slots_(degree) {}

    std::size_t degree() const { return slots_.size(); }
    bool free(std::size_t port) const { return !slots_[port].has_value(); }

    void send(std::size_t port, envelope e) {
        if (port >= slots_.size()) throw std::logic_error("send on a port the node does not have");
        if (slots_[port]) throw std::logic_error("edge capacity exceeded: two envelopes on one edge in one round");
        if (envelope_words(e) > envelope_capacity_words) throw std::logic_error("envelope exceeds word budget");
        slots_[port] = std::move(e);
    }

    void broadcast(const envelope& e) {
        for (std::size_t p = 0; p < slots_.size(); ++p) send(p, e);
    }

    std::vector<std::optional<envelope>>& slots() { return slots_; }

private:
    std::vector<std::optional<envelope>> slots_;
};

template <class P>
concept node_process = requires(P p, const P cp, std::uint64_t round, std::span<const inbound> in, outbox& out) {
    p.on_round(round, in, out);
    { cp.quiescent() } -> std::convertible_to<bool>;
};

template <class P>
concept reports_queues = requires(const P cp) {
    { cp.nonempty_queues() } -> std::convertible_to<std::size_t>;
};

class round_limit_exceeded : public error {
public:
    round_limit_exceeded(std::uint64_t limit, run_metrics partial)
        : error(error_kind::round_limit, "round limit exceeded (" + std::to_string(limit) + " rounds)"),
          partial_(std::move(partial)) {}

    const run_metrics& partial() const { return partial_; }

private:
    run_metrics partial_;
};

template <class P>
struct run_result {
    std::vector<P> nodes;
    run_metrics metrics;
    std::vector<message_counts> traffic;  // traffic[r - 1] = envelopes sent in round r
};

// Runs until, after some round, every process is quiescent and nothing was
// sent in that round (so nothing is in flight). That round is the count.
template <class Factory>
    requires node_process<std::invoke_result_t<Factory&, node_id, std::span<const port>>>
auto run(const graph& g, Factory&& make, std::uint64_t round_limit, const std::string& phase_id = "run") {
    using P = std::invoke_result_t<Factory&, node_id, std::span<const port>>;
    if (round_limit == 0) throw error(error_kind::invalid_argument, "round_limit must be positive");
    std::size_t n = g.node_count();

    run_result<P> result;
    result.nodes.reserve(n);
    for (std::size_t u = 0; u < n; ++u) {
        const auto& ps = g.ports(static_cast<node_id>(u));
        result.nodes.push_back(make(static_cast<node_id>(u), std::span<const port>(ps.data(), ps.size())));
    }

    // reverse[u][p]: index of u among the ports of its p-th neighbor.
    std::vector<std::vector<std::size_t>> reverse(n);
    for (std::size_t u = 0; u < n; ++u)
        for (const auto& p : g.ports(static_cast<node_id>(u)))
            reverse[u].push_back(g.port_of(p.neighbor, static_cast<node_id>(u)));

    std::vector<std::vector<inbound>> inbox(n), next(n);
    phase_metrics phase;
    phase.id = phase_id;
    std::uint64_t last_data_round = 0;
    std::uint64_t max_queues = 0;

    auto finish = [&](std::uint64_t rounds) {
        phase.rounds = rounds;
        phase.quiescent_at = last_data_round == 0 ? 1 : last_data_round + 1;
        run_metrics m;
        m.add_phase(phase);
        m.note_queue_depth(max_queues);
        return m;
    };

    for (std::uint64_t round = 1;; ++round) {
        if (round > round_limit) throw round_limit_exceeded(round_limit, finish(round_limit));
        message_counts traffic;
        for (std::size_t u = 0; u < n; ++u) {
            const auto& ps = g.ports(static_cast<node_id>(u));
            outbox out(ps.size());
            result.nodes[u].on_round(round, std::span<const inbound>(inbox[u]), out);
            auto& slots = out.slots();
            for (std::size_t p = 0; p < slots.size(); ++p) {
                if (!slots[p]) continue;
                traffic.count(*slots[p]);
                next[ps[p].neighbor].push_back({reverse[u][p], std::move(*slots[p])});
            }
            if constexpr (reports_queues<P>)
                max_queues = std::max<std::uint64_t>(max_queues, result.nodes[u].nonempty_queues());
        }
        // Senders were visited in ascending ID, which is also port order.
        std::swap(inbox, next);
        for (auto& q : next) q.clear();
        phase.messages += traffic;
        result.traffic.push_back(traffic);
        if (traffic.data() > 0) last_data_round = round;

        bool idle = traffic.data() == 0 && traffic.control() == 0;
        for (std::size_t u = 0; idle && u < n; ++u) idle = result.nodes[u].quiescent();
        if (idle) {
            result.metrics = finish(round);
            return result;
        }
    }
}

}  // namespace dsketch::congest
