#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "dsketch/error.hpp"

namespace dsketch {

// Exact non-negative fraction. Used for slack parameters so that every
// "at least eps * n nodes" test is an integer comparison.
struct rational {
    std::uint64_t num = 1;
    std::uint64_t den = 1;

    constexpr rational() = default;
    constexpr rational(std::uint64_t n, std::uint64_t d) : num(n), den(d) {
        if (d == 0) throw error(error_kind::invalid_argument, "rational with zero denominator");
        auto g = std::gcd(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    // count >= this * n
    constexpr bool count_reaches(std::uint64_t count, std::uint64_t n) const {
        return static_cast<unsigned __int128>(count) * den >= static_cast<unsigned __int128>(num) * n;
    }

    std::string str() const {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }

    friend constexpr bool operator==(const rational& a, const rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend constexpr bool operator<(const rational& a, const rational& b) {
        return static_cast<unsigned __int128>(a.num) * b.den < static_cast<unsigned __int128>(b.num) * a.den;
    }
};

// Accepts "a/b", integers, and plain decimals such as "0.125".
inline rational parse_rational(const std::string& text) {
    auto bad = [&] { return error(error_kind::parse, "not a rational number: '" + text + "'"); };
    auto parse_u64 = [&](const std::string& s) -> std::uint64_t {
        if (s.empty() || s.size() > 18) throw bad();
        std::uint64_t v = 0;
        for (char c : s) {
            if (c < '0' || c > '9') throw bad();
            v = v * 10 + static_cast<std::uint64_t>(c - '0');
        }
        return v;
    };
    if (auto slash = text.find('/'); slash != std::string::npos) {
        auto d = parse_u64(text.substr(slash + 1));
        if (d == 0) throw bad();
        return rational(parse_u64(text.substr(0, slash)), d);
    }
    if (auto dot = text.find('.'); dot != std::string::npos) {
        std::string whole = text.substr(0, dot);
        std::string frac = text.substr(dot + 1);
        if (frac.empty() || frac.size() > 12) throw bad();
        std::uint64_t den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        return rational(parse_u64(whole.empty() ? "0" : whole) * den + parse_u64(frac), den);
    }
    return rational(parse_u64(text), 1);
}

}  // namespace dsketch
