#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "dsketch/envelope.hpp"

namespace dsketch {

struct message_counts {
    std::uint64_t announce = 0;
    std::uint64_t label_word = 0;
    std::uint64_t echo = 0;
    std::uint64_t complete = 0;
    std::uint64_t start = 0;

    std::uint64_t data() const { return announce + label_word; }
    std::uint64_t control() const { return echo + complete + start; }

    void count(const envelope& e) {
        std::visit(
            [this](const auto& m) {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, dsketch::announce>) ++announce;
                else if constexpr (std::is_same_v<T, dsketch::label_word>) ++label_word;
                else if constexpr (std::is_same_v<T, dsketch::echo>) ++echo;
                else if constexpr (std::is_same_v<T, dsketch::complete>) ++complete;
                else ++start;
            },
            e);
    }

    message_counts& operator+=(const message_counts& o) {
        announce += o.announce;
        label_word += o.label_word;
        echo += o.echo;
        complete += o.complete;
        start += o.start;
        return *this;
    }

    friend bool operator==(const message_counts&, const message_counts&) = default;
};

struct phase_metrics {
    std::string id;
    std::uint64_t rounds = 0;
    message_counts messages;
    // Round budget granted to the phase (fixed-S mode), 0 when none.
    std::uint64_t budget = 0;
    // Phase-relative round in which the last data message was received
    // (the quiescence round); 1 for a phase without data traffic.
    std::uint64_t quiescent_at = 0;
    // Phase-relative round in which the root detected completion (detect mode).
    std::uint64_t detected_at = 0;

    std::uint64_t data_msgs() const { return messages.data(); }
    std::uint64_t control_msgs() const { return messages.control(); }

    friend bool operator==(const phase_metrics&, const phase_metrics&) = default;
};

// Totals are kept equal to the sums over per_phase by construction: phases
// are only ever added through add_phase.
class run_metrics {
public:
    std::uint64_t rounds() const { return rounds_; }
    const message_counts& messages() const { return messages_; }
    std::uint64_t data_msgs() const { return messages_.data(); }
    std::uint64_t control_msgs() const { return messages_.control(); }
    const std::vector<phase_metrics>& per_phase() const { return per_phase_; }
    std::uint64_t max_nonempty_queues() const { return max_nonempty_queues_; }

    void add_phase(phase_metrics p) {
        rounds_ += p.rounds;
        messages_ += p.messages;
        per_phase_.push_back(std::move(p));
    }

    void note_queue_depth(std::uint64_t q) { max_nonempty_queues_ = std::max(max_nonempty_queues_, q); }

    // Appends every phase of `other`, prefixing ids.
    void absorb(const run_metrics& other, const std::string& prefix = "") {
        for (auto p : other.per_phase_) {
            p.id = prefix + p.id;
            add_phase(std::move(p));
        }
        note_queue_depth(other.max_nonempty_queues_);
    }

    friend bool operator==(const run_metrics&, const run_metrics&) = default;

private:
    std::uint64_t rounds_ = 0;
    message_counts messages_;
    std::vector<phase_metrics> per_phase_;
    std::uint64_t max_nonempty_queues_ = 0;
};

}  // namespace dsketch
