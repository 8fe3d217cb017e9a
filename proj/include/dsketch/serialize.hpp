#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "json.hpp"

#include "dsketch/error.hpp"
#include "dsketch/gd_protocol.hpp"
#include "dsketch/label.hpp"
#include "dsketch/metrics.hpp"
#include "dsketch/query.hpp"
#include "dsketch/rational.hpp"
#include "dsketch/slack_protocol.hpp"

namespace dsketch {

enum class scheme : std::uint32_t { tz = 1, slack3 = 2, cdg = 3, gd = 4 };

inline const char* to_string(scheme s) {
    switch (s) {
        case scheme::tz: return "tz";
        case scheme::slack3: return "slack3";
        case scheme::cdg: return "cdg";
        case scheme::gd: return "gd";
    }
    return "?";
}

inline scheme parse_scheme(const std::string& s) {
    if (s == "tz") return scheme::tz;
    if (s == "slack3") return scheme::slack3;
    if (s == "cdg") return scheme::cdg;
    if (s == "gd") return scheme::gd;
    throw error(error_kind::invalid_argument, "unknown scheme '" + s + "' (expected tz, slack3, cdg or gd)");
}

// All sketches of one build. Only the vector matching `kind` is populated.
// k is 0 for slack3 and gd; eps is 0 for tz and gd.
struct sketch_set {
    scheme kind = scheme::tz;
    std::uint32_t k = 0;
    rational eps{0, 1};
    std::vector<tz_label> tz;
    std::vector<slack3_sketch> slack3;
    std::vector<cdg_sketch> cdg;
    std::vector<gd_sketch> gd;

    std::size_t size() const {
        switch (kind) {
            case scheme::tz: return tz.size();
            case scheme::slack3: return slack3.size();
            case scheme::cdg: return cdg.size();
            case scheme::gd: return gd.size();
        }
        return 0;
    }

    std::size_t words(node_id u) const {
        switch (kind) {
            case scheme::tz: return tz[u].words();
            case scheme::slack3: return slack3[u].words();
            case scheme::cdg: return cdg[u].words();
            case scheme::gd: return gd[u].words();
        }
        return 0;
    }

    distance estimate(node_id u, node_id v) const;

    friend bool operator==(const sketch_set&, const sketch_set&) = default;
};

inline constexpr std::uint32_t sketch_format_version = 1;

namespace detail {

class byte_writer {
public:
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void raw(const char* s, std::size_t n) { out_.append(s, n); }
    std::string take() { return std::move(out_); }

private:
    void put(std::uint64_t v, int bytes) {
        for (int i = 0; i < bytes; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    std::string out_;
};

class byte_reader {
public:
    explicit byte_reader(const std::string& in) : in_(in) {}

    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }
    std::string raw(std::size_t n) {
        need(n);
        auto s = in_.substr(at_, n);
        at_ += n;
        return s;
    }
    // Guards vector reservations against absurd counts in damaged files.
    std::uint64_t count(std::size_t min_record_bytes) {
        auto c = u32();
        if (c * min_record_bytes > in_.size() - at_) throw error(error_kind::parse, "truncated sketch file");
        return c;
    }
    bool done() const { return at_ == in_.size(); }

private:
    void need(std::size_t n) const {
        if (in_.size() - at_ < n) throw error(error_kind::parse, "truncated sketch file");
    }
    std::uint64_t get(int bytes) {
        need(static_cast<std::size_t>(bytes));
        std::uint64_t v = 0;
        for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[at_ + i])) << (8 * i);
        at_ += static_cast<std::size_t>(bytes);
        return v;
    }
    const std::string& in_;
    std::size_t at_ = 0;
};

inline void write_label(byte_writer& w, const tz_label& l) {
    w.u32(l.owner);
    w.u32(l.k);
    for (const auto& p : l.pivots) {
        w.u32(p.node);
        w.u64(p.dist);
    }
    w.u32(static_cast<std::uint32_t>(l.bunch.size()));
    for (const auto& e : l.bunch) {
        w.u32(e.node);
        w.u32(e.level);
        w.u64(e.dist);
    }
}

inline tz_label read_label(byte_reader& r) {
    tz_label l;
    l.owner = r.u32();
    l.k = r.u32();
    if (l.k > 64) throw error(error_kind::parse, "implausible k in sketch file");
    for (std::uint32_t i = 0; i < l.k; ++i) {
        pivot p;
        p.node = r.u32();
        p.dist = r.u64();
        l.pivots.push_back(p);
    }
    auto count = r.count(16);
    for (std::uint64_t j = 0; j < count; ++j) {
        bunch_entry e;
        e.node = r.u32();
        e.level = r.u32();
        e.dist = r.u64();
        l.bunch.push_back(e);
    }
    return l;
}

inline void write_cdg(byte_writer& w, const cdg_sketch& s) {
    w.u32(s.owner);
    w.u32(s.nearest);
    w.u64(s.dist);
    write_label(w, s.net_label);
}

inline cdg_sketch read_cdg(byte_reader& r) {
    cdg_sketch s;
    s.owner = r.u32();
    s.nearest = r.u32();
    s.dist = r.u64();
    s.net_label = read_label(r);
    return s;
}

}  // namespace detail

// Little-endian layout: "DSKT", version, scheme, k, eps numerator and
// denominator (u64 each), record count, then one record per node.
inline std::string encode_sketches(const sketch_set& s) {
    detail::byte_writer w;
    w.raw("DSKT", 4);
    w.u32(sketch_format_version);
    w.u32(static_cast<std::uint32_t>(s.kind));
    w.u32(s.k);
    w.u64(s.eps.num);
    w.u64(s.eps.den);
    w.u32(static_cast<std::uint32_t>(s.size()));
    switch (s.kind) {
        case scheme::tz:
            for (const auto& l : s.tz) detail::write_label(w, l);
            break;
        case scheme::slack3:
            for (const auto& x : s.slack3) {
                w.u32(x.owner);
                w.u32(static_cast<std::uint32_t>(x.table.size()));
                for (const auto& [node, d] : x.table) {
                    w.u32(node);
                    w.u64(d);
                }
            }
            break;
        case scheme::cdg:
            for (const auto& x : s.cdg) detail::write_cdg(w, x);
            break;
        case scheme::gd:
            for (const auto& x : s.gd) {
                w.u32(x.owner);
                w.u32(static_cast<std::uint32_t>(x.levels.size()));
                for (const auto& l : x.levels) {
                    w.u32(l.i);
                    w.u32(l.k);
                    detail::write_cdg(w, l.sketch);
                }
            }
            break;
    }
    return w.take();
}

inline sketch_set decode_sketches(const std::string& bytes) {
    detail::byte_reader r(bytes);
    if (bytes.size() < 4 || r.raw(4) != "DSKT") throw error(error_kind::parse, "not a sketch file (bad magic)");
    if (auto v = r.u32(); v != sketch_format_version)
        throw error(error_kind::incompatible, "unsupported sketch format version " + std::to_string(v));
    sketch_set s;
    auto kind = r.u32();
    if (kind < 1 || kind > 4) throw error(error_kind::parse, "unknown scheme tag in sketch file");
    s.kind = static_cast<scheme>(kind);
    s.k = r.u32();
    auto num = r.u64();
    auto den = r.u64();
    if (den == 0) throw error(error_kind::parse, "zero eps denominator in sketch file");
    s.eps = rational(num, den);
    auto count = r.count(8);
    for (std::uint64_t j = 0; j < count; ++j) {
        switch (s.kind) {
            case scheme::tz: s.tz.push_back(detail::read_label(r)); break;
            case scheme::slack3: {
                slack3_sketch x;
                x.owner = r.u32();
                auto m = r.count(12);
                for (std::uint64_t t = 0; t < m; ++t) {
                    auto node = r.u32();
                    x.table.emplace_back(node, r.u64());
                }
                s.slack3.push_back(std::move(x));
                break;
            }
            case scheme::cdg: s.cdg.push_back(detail::read_cdg(r)); break;
            case scheme::gd: {
                gd_sketch x;
                x.owner = r.u32();
                auto m = r.count(24);
                for (std::uint64_t t = 0; t < m; ++t) {
                    gd_level l;
                    l.i = r.u32();
                    l.k = r.u32();
                    l.sketch = detail::read_cdg(r);
                    x.levels.push_back(std::move(l));
                }
                s.gd.push_back(std::move(x));
                break;
            }
        }
    }
    if (!r.done()) throw error(error_kind::parse, "trailing bytes in sketch file");
    return s;
}

inline distance sketch_set::estimate(node_id u, node_id v) const {
    switch (kind) {
        case scheme::tz: return tz_estimate(tz.at(u), tz.at(v));
        case scheme::slack3: return slack3_estimate(slack3.at(u), slack3.at(v));
        case scheme::cdg: return cdg_estimate(cdg.at(u), cdg.at(v));
        case scheme::gd: return gd_estimate(gd.at(u), gd.at(v));
    }
    return infinite_distance;
}

namespace detail {

inline void check_label(const tz_label& l, std::uint32_t k, std::vector<std::string>& out, const std::string& where) {
    auto bad = [&](const std::string& what) { out.push_back(where + ": " + what); };
    if (l.k != k) return bad("k is " + std::to_string(l.k) + ", expected " + std::to_string(k));
    if (l.pivots.size() != k) return bad("wrong pivot count");
    for (std::size_t j = 1; j < l.bunch.size(); ++j)
        if (l.bunch[j - 1].node >= l.bunch[j].node) return bad("bunch not sorted by node");
    for (std::uint32_t i = 1; i < k; ++i)
        if (dist_key{l.pivots[i].dist, l.pivots[i].node} < dist_key{l.pivots[i - 1].dist, l.pivots[i - 1].node})
            return bad("pivots out of order");
    for (const auto& e : l.bunch) {
        if (e.level >= k) return bad("bunch level out of range");
        if (e.level + 1 < k) {
            const auto& p = l.pivots[e.level + 1];
            if (!(dist_key{e.dist, e.node} < dist_key{p.dist, p.node})) return bad("bunch entry beyond its pivot");
        }
    }
    const auto* top = l.find_at_level(l.pivots[k - 1].node, k - 1);
    if (!top || top->dist != l.pivots[k - 1].dist) return bad("top pivot missing from bunch");
}

}  // namespace detail

// Structural invariants that hold for every correctly built sketch set on an
// n-node graph. Returns one message per violation found.
inline std::vector<std::string> check_sketches(const sketch_set& s, std::size_t n) {
    std::vector<std::string> out;
    if (s.size() != n) {
        out.push_back("sketch count " + std::to_string(s.size()) + " does not match node count " + std::to_string(n));
        return out;
    }
    auto where = [](node_id u) { return "node " + std::to_string(u); };
    for (node_id u = 0; u < n; ++u) {
        switch (s.kind) {
            case scheme::tz:
                if (s.tz[u].owner != u) out.push_back(where(u) + ": owner mismatch");
                detail::check_label(s.tz[u], s.k, out, where(u));
                break;
            case scheme::slack3: {
                const auto& t = s.slack3[u].table;
                if (s.slack3[u].owner != u) out.push_back(where(u) + ": owner mismatch");
                bool same = t.size() == s.slack3[0].table.size();
                for (std::size_t j = 0; same && j < t.size(); ++j) same = t[j].first == s.slack3[0].table[j].first;
                if (!same) out.push_back(where(u) + ": net differs from node 0");
                break;
            }
            case scheme::cdg: {
                const auto& c = s.cdg[u];
                if (c.owner != u) out.push_back(where(u) + ": owner mismatch");
                if (c.net_label.owner != c.nearest) out.push_back(where(u) + ": label owner is not the nearest member");
                if (c.nearest >= n || s.cdg[c.nearest].net_label != c.net_label)
                    out.push_back(where(u) + ": label differs from its nearest member's");
                detail::check_label(c.net_label, s.k, out, where(u));
                break;
            }
            case scheme::gd: {
                const auto& g = s.gd[u];
                if (g.owner != u) out.push_back(where(u) + ": owner mismatch");
                if (g.levels.size() != gd_level_count(n)) {
                    out.push_back(where(u) + ": wrong level count");
                    break;
                }
                for (std::uint32_t j = 0; j < g.levels.size(); ++j) {
                    const auto& l = g.levels[j];
                    if (l.i != j + 1 || l.k != gd_level_k(n, j + 1)) {
                        out.push_back(where(u) + ": level parameters out of sequence");
                        continue;
                    }
                    if (l.sketch.owner != u || l.sketch.net_label.owner != l.sketch.nearest)
                        out.push_back(where(u) + ": level " + std::to_string(l.i) + " owner mismatch");
                    detail::check_label(l.sketch.net_label, l.k, out, where(u) + " level " + std::to_string(l.i));
                }
                break;
            }
        }
    }
    return out;
}

using json = nlohmann::ordered_json;

inline json label_json(const tz_label& l) {
    json pivots = json::array();
    for (const auto& p : l.pivots) pivots.push_back({{"node", p.node}, {"dist", p.dist}});
    json bunch = json::array();
    for (const auto& e : l.bunch) bunch.push_back({{"node", e.node}, {"level", e.level}, {"dist", e.dist}});
    return {{"owner", l.owner}, {"k", l.k}, {"pivots", pivots}, {"bunch", bunch}};
}

inline json cdg_json(const cdg_sketch& s) {
    return {{"owner", s.owner}, {"nearest", s.nearest}, {"dist", s.dist}, {"net_label", label_json(s.net_label)}};
}

// Human-readable mirror of the binary file.
inline json sketches_json(const sketch_set& s) {
    json out{{"format_version", sketch_format_version},
             {"scheme", to_string(s.kind)},
             {"k", s.k},
             {"eps", s.eps.str()},
             {"count", s.size()}};
    json items = json::array();
    switch (s.kind) {
        case scheme::tz:
            for (const auto& l : s.tz) items.push_back(label_json(l));
            break;
        case scheme::slack3:
            for (const auto& x : s.slack3) {
                json table = json::array();
                for (const auto& [node, d] : x.table) table.push_back({{"node", node}, {"dist", d}});
                items.push_back({{"owner", x.owner}, {"table", table}});
            }
            break;
        case scheme::cdg:
            for (const auto& x : s.cdg) items.push_back(cdg_json(x));
            break;
        case scheme::gd:
            for (const auto& x : s.gd) {
                json levels = json::array();
                for (const auto& l : x.levels)
                    levels.push_back({{"i", l.i}, {"eps", l.eps().str()}, {"k", l.k}, {"sketch", cdg_json(l.sketch)}});
                items.push_back({{"owner", x.owner}, {"levels", levels}});
            }
            break;
    }
    out["sketches"] = std::move(items);
    return out;
}

inline json phase_json(const phase_metrics& p) {
    return {{"id", p.id},
            {"rounds", p.rounds},
            {"budget", p.budget},
            {"quiescent_at", p.quiescent_at},
            {"detected_at", p.detected_at},
            {"data_msgs", p.data_msgs()},
            {"control_msgs", p.control_msgs()},
            {"messages",
             {{"announce", p.messages.announce},
              {"label_word", p.messages.label_word},
              {"echo", p.messages.echo},
              {"complete", p.messages.complete},
              {"start", p.messages.start}}}};
}

}  // namespace dsketch
