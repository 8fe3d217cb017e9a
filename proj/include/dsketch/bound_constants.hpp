#pragma once

// Constants for the complexity and size regressions. They were frozen from
// measurements over the acceptance corpus with headroom added, and are meant
// to change only by deliberate edit: a run that exceeds one is a regression.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dsketch/rational.hpp"

namespace dsketch::bounds {

inline constexpr double tz_rounds = 1.0;
inline constexpr double tz_data = 0.9;
inline constexpr double tz_words = 4.5;
inline constexpr double slack3_rounds = 2.0;
inline constexpr double slack3_data = 3.0;
inline constexpr double cdg_rounds = 1.5;
inline constexpr double cdg_data = 3.5;
inline constexpr double cdg_words = 9.0;
inline constexpr double gd_rounds = 1.1;
inline constexpr double gd_data = 1.4;
inline constexpr double gd_words = 4.5;
inline constexpr double gd_avg_stretch = 1.6;
// Detected phase end minus quiescence round, per unit of (D + 1).
inline constexpr double detect_lag = 4.0;
// Multiplier on the round and data constants for detect-mode builds.
inline constexpr double detect_overhead = 6.0;

inline double ln(std::size_t n) { return std::log(static_cast<double>(std::max<std::size_t>(n, 2))); }
inline double s1(std::size_t S) { return static_cast<double>(std::max<std::size_t>(S, 1)); }

// k n^{1/k} S ln n
inline double tz_round_shape(std::size_t n, std::uint32_t k, std::size_t S) {
    return k * std::pow(static_cast<double>(n), 1.0 / k) * s1(S) * ln(n);
}
// k n^{1/k} ln n
inline double tz_word_shape(std::size_t n, std::uint32_t k) { return k * std::pow(static_cast<double>(n), 1.0 / k) * ln(n); }
// S (1/eps) ln n
inline double slack_round_shape(std::size_t n, rational eps, std::size_t S) { return s1(S) * ln(n) / eps.value(); }
// k ((1/eps) ln n)^{1/k} ln n
inline double cdg_word_shape(std::size_t n, rational eps, std::uint32_t k) {
    return k * std::pow(ln(n) / eps.value(), 1.0 / k) * ln(n);
}
inline double cdg_round_shape(std::size_t n, rational eps, std::uint32_t k, std::size_t S) {
    return cdg_word_shape(n, eps, k) * s1(S);
}
// ln^4 n
inline double gd_word_shape(std::size_t n) { return std::pow(ln(n), 4); }
inline double gd_round_shape(std::size_t n, std::size_t S) { return s1(S) * gd_word_shape(n); }

// Rounds a phase needs at least: S hops plus a send and a quiet round.
inline double phase_floor(std::size_t S) { return static_cast<double>(S) + 2; }
// Size of a TZ label that holds every node.
inline double full_label_words(std::size_t n, std::uint32_t k) { return 3.0 + 2.0 * k + 3.0 * static_cast<double>(n); }

// measured <= max(constant * shape, floor). The floor is a trivial cost that
// dominates on tiny graphs, where the asymptotic shape undershoots.
struct check {
    std::string name;
    double measured = 0;
    double shape = 1;
    double constant = 0;
    double floor = 0;

    double bound() const { return std::max(constant * shape, floor); }
    double ratio() const { return measured / shape; }
    bool ok() const { return measured <= bound(); }
};

}  // namespace dsketch::bounds
