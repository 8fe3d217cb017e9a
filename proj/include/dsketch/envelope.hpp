#pragma once

#include <cstdint>
#include <variant>

#include "dsketch/graph.hpp"

namespace dsketch {

// <source, distance> distance announcement (Bellman-Ford payload).
struct announce {
    node_id source;
    distance dist;
    friend bool operator==(const announce&, const announce&) = default;
};

// Acknowledges one received announce; carries a copy of it.
struct echo {
    node_id source;
    distance dist;
    friend bool operator==(const echo&, const echo&) = default;
};

// Convergecast up the BFS tree: this subtree is done with the phase.
struct complete {
    friend bool operator==(const complete&, const complete&) = default;
};

// Broadcast down the BFS tree: begin `phase` at absolute round `at_round`.
struct start {
    std::uint32_t phase;
    std::uint64_t at_round;
    friend bool operator==(const start&, const start&) = default;
};

// One word of a serialized label streamed to nearest-net clusters.
struct label_word {
    std::uint32_t index;
    std::uint64_t value;
    friend bool operator==(const label_word&, const label_word&) = default;
};

using envelope = std::variant<announce, echo, complete, start, label_word>;

// Tag word plus payload words.
constexpr std::size_t envelope_words(const envelope& e) {
    return 1 + std::visit(
                   [](const auto& m) -> std::size_t {
                       using T = std::decay_t<decltype(m)>;
                       if constexpr (std::is_same_v<T, complete>) return 0;
                       else return 2;
                   },
                   e);
}

inline constexpr std::size_t envelope_capacity_words = 3;

constexpr bool is_data(const envelope& e) {
    return std::holds_alternative<announce>(e) || std::holds_alternative<label_word>(e);
}

}  // namespace dsketch
