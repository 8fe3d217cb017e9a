// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// line fails. Every tolerance is pinned here or in bound_constants.hpp.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "dsketch/bound_constants.hpp"
#include "dsketch/build.hpp"
#include "dsketch/cli.hpp"
#include "dsketch/generators.hpp"
#include "dsketch/oracle.hpp"
#include "dsketch/query.hpp"
#include "dsketch/stretch_report.hpp"
#include "dsketch/tz_protocol.hpp"

using namespace dsketch;
namespace fs = std::filesystem;

namespace {

constexpr int seeds_per_config = 20;
// Detect-mode complexity samples for the slack and degrading schemes.
constexpr std::uint64_t detect_seeds = 5;

struct instance {
    std::string name;
    std::uint64_t seed;
    graph g;
    oracle::distance_matrix dm;
    std::size_t S;
    std::size_t D;
};

instance make_instance(std::string name, std::uint64_t seed, graph g) {
    oracle::distance_matrix dm(g);
    auto S = oracle::shortest_path_diameter(g);
    auto D = oracle::hop_diameter(g);
    return {std::move(name) + "/s" + std::to_string(seed), seed, std::move(g), std::move(dm), S, D};
}

std::vector<instance> corpus() {
    std::vector<instance> out;
    for (std::uint64_t s = 1; s <= seeds_per_config; ++s) {
        out.push_back(make_instance("path32w", s, make_path(32, {1, 16}, rng{s})));
        out.push_back(make_instance("grid8x8w", s, make_grid(8, 8, {1, 16}, rng{s})));
        out.push_back(make_instance("er32", s, make_erdos_renyi(32, 0.2, {1, 16}, rng{s})));
        out.push_back(make_instance("er64", s, make_erdos_renyi(64, 0.1, {1, 16}, rng{s})));
        out.push_back(make_instance("er128", s, make_erdos_renyi(128, 0.05, {1, 16}, rng{s})));
        out.push_back(make_instance("er256", s, make_erdos_renyi(256, 0.03, {1, 16}, rng{s})));
    }
    return out;
}

bool is_er(const instance& in, std::size_t n) { return in.name.rfind("er" + std::to_string(n) + "/", 0) == 0; }

// Running maximum of measured / shape for one named bound.
struct ratio_tracker {
    std::map<std::string, double> worst;
    std::map<std::string, double> constant;
    std::size_t failures = 0;

    void add(const std::string& scheme, const bounds::check& c) {
        auto key = scheme + "." + c.name;
        worst[key] = std::max(worst[key], c.ratio());
        constant[key] = c.constant;
        failures += !c.ok();
    }

    std::string summary() const {
        std::ostringstream os;
        os << std::setprecision(3);
        for (const auto& [k, v] : worst) os << " " << k << "=" << v << "/" << constant.at(k);
        return os.str();
    }
};

struct verdict {
    int id;
    std::string title;
    bool pass;
    std::string detail;
};

std::vector<verdict> results;

void report(int id, const std::string& title, bool pass, const std::string& detail) {
    results.push_back({id, title, pass, detail});
    std::cout << "criterion " << id << " " << title << ": " << (pass ? "PASS" : "FAIL") << " | " << detail << std::endl;
}

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(4) << x;
    return os.str();
}

// ---------------------------------------------------------------------------

ratio_tracker complexity;

void tz_criteria(const std::vector<instance>& all) {
    std::size_t runs = 0, mismatches = 0, stretch_violations = 0, k1_not_exact = 0;
    std::size_t detect_runs = 0, detect_label_mismatch = 0, echo_mismatch = 0, tree_overhead = 0, lag_violations = 0;
    double worst_stretch[4] = {0, 0, 0, 0};
    double worst_lag = 0, worst_lag_vs_s = 0, worst_tree_share = 0;
    for (const auto& in : all) {
        std::size_t n = in.g.node_count();
        for (std::uint32_t k = 1; k <= 3; ++k) {
            auto levels = sample_hierarchy(n, k, rng{in.seed * 1000 + k});
            auto fixed = run_tz_protocol(in.g, levels, build_mode::fixed(in.S), tz_bunch_bound(n, k));
            ++runs;
            if (fixed.labels != oracle::centralized_tz(in.dm, levels)) ++mismatches;

            for (node_id u = 0; u < n; ++u)
                for (node_id v = u + 1; v < n; ++v) {
                    distance e = tz_estimate(fixed.labels[u], fixed.labels[v]);
                    distance d = in.dm(u, v);
                    worst_stretch[k] = std::max(worst_stretch[k], stretch_ratio(e, d));
                    if (e < d || !within(e, d, 2 * k - 1)) ++stretch_violations;
                    if (k == 1 && e != d) ++k1_not_exact;
                }

            built_sketches b;
            b.sketches.kind = scheme::tz;
            b.sketches.k = k;
            b.sketches.tz = fixed.labels;
            b.metrics = fixed.metrics;
            b.S = in.S;
            for (const auto& c : complexity_checks(in.g, b)) complexity.add("tz", c);

            auto det = run_tz_protocol(in.g, levels, build_mode::detect(), tz_bunch_bound(n, k));
            ++detect_runs;
            b.metrics = det.metrics;
            b.mode = termination_mode::detect;
            for (const auto& c : complexity_checks(in.g, b)) complexity.add("tz-detect", c);
            if (det.labels != fixed.labels) ++detect_label_mismatch;
            if (det.metrics.messages().echo != det.metrics.messages().announce) ++echo_mismatch;
            for (const auto& ph : det.metrics.per_phase()) {
                if (ph.messages.echo != ph.messages.announce) ++echo_mismatch;
                auto tree = ph.messages.complete + ph.messages.start;
                worst_tree_share = std::max(worst_tree_share, static_cast<double>(tree) / static_cast<double>(n));
                if (tree > 3 * n) ++tree_overhead;
                double lag = static_cast<double>(ph.detected_at - ph.quiescent_at);
                worst_lag = std::max(worst_lag, lag / static_cast<double>(in.D + 1));
                worst_lag_vs_s = std::max(worst_lag_vs_s, lag / static_cast<double>(in.S + 1));
                if (lag > bounds::detect_lag * static_cast<double>(in.D + 1)) ++lag_violations;
            }
        }
    }
    report(1, "oracle-equivalence", mismatches == 0,
           std::to_string(runs) + " runs (k=1..3), " + std::to_string(mismatches) + " label mismatches");
    report(2, "tz-worst-case-stretch", stretch_violations == 0 && k1_not_exact == 0,
           "max stretch k=1 " + fmt(worst_stretch[1]) + " (ceiling 1), k=2 " + fmt(worst_stretch[2]) +
               " (ceiling 3), k=3 " + fmt(worst_stretch[3]) + " (ceiling 5); " + std::to_string(stretch_violations) +
               " violations, " + std::to_string(k1_not_exact) + " inexact k=1 pairs");
    report(6, "termination-detection",
           detect_label_mismatch == 0 && echo_mismatch == 0 && tree_overhead == 0 && lag_violations == 0,
           std::to_string(detect_runs) + " runs; label mismatches " + std::to_string(detect_label_mismatch) +
               ", echo!=announce " + std::to_string(echo_mismatch) + ", max (COMPLETE+START)/n " +
               fmt(worst_tree_share) + " (ceiling 3), max lag/(D+1) " + fmt(worst_lag) + " (ceiling " +
               fmt(bounds::detect_lag) + "), max lag/(S+1) " + fmt(worst_lag_vs_s) + ", lag violations " +
               std::to_string(lag_violations));
}

void slack_criterion(const std::vector<instance>& all) {
    std::size_t runs = 0, violations = 0, below = 0;
    std::map<std::string, double> worst_far, worst_near;
    std::map<std::string, std::size_t> near_pairs;
    for (const auto& in : all) {
        for (rational eps : {rational(1, 4), rational(1, 8)}) {
            for (scheme kind : {scheme::slack3, scheme::cdg}) {
                build_config c;
                c.kind = kind;
                c.eps = eps;
                if (kind == scheme::cdg) c.k = 2;
                c.seed = in.seed;
                auto b = build_sketches(in.g, in.dm, c);
                for (const auto& ch : complexity_checks(in.g, b)) complexity.add(to_string(kind), ch);
                if (in.seed <= detect_seeds) {
                    c.mode = termination_mode::detect;
                    auto d = build_sketches(in.g, in.dm, c);
                    for (const auto& ch : complexity_checks(in.g, d)) complexity.add(std::string(to_string(kind)) + "-detect", ch);
                }
                auto ceil = ceilings_for(b.sketches, in.g.node_count());
                auto rep = make_stretch_report(
                    in.dm, [&](node_id u, node_id v) { return b.sketches.estimate(u, v); }, {}, rng{in.seed}, std::nullopt,
                    ceil.slack);
                ++runs;
                below += rep.below_truth;
                const auto& s = rep.slack_view.front();
                violations += s.violations;
                auto key = std::string(to_string(kind)) + "@" + eps.str();
                worst_far[key] = std::max(worst_far[key], s.far_max);
                worst_near[key] = std::max(worst_near[key], s.near_max);
                near_pairs[key] += s.near_pairs;
            }
        }
    }
    std::ostringstream os;
    os << runs << " runs; far-pair max stretch:";
    for (const auto& [k, v] : worst_far) os << " " << k << "=" << fmt(v);
    os << " (ceilings slack3 3, cdg k=2 15); violations " << violations << ", underestimates " << below
       << "; unconstrained near pairs:";
    for (const auto& [k, v] : worst_near) os << " " << k << " max " << fmt(v) << " over " << near_pairs[k];
    report(3, "slack-stretch", violations == 0 && below == 0, os.str());
}

void gd_criterion(const std::vector<instance>& all) {
    std::size_t runs = 0, violations = 0, over_max = 0, over_avg = 0, over_words = 0;
    double worst_avg = 0, worst_avg_256 = 0, worst_max_256 = 0, worst_words = 0;
    for (const auto& in : all) {
        build_config c;
        c.kind = scheme::gd;
        c.seed = in.seed;
        auto b = build_sketches(in.g, in.dm, c);
        for (const auto& ch : complexity_checks(in.g, b)) complexity.add("gd", ch);
        if (in.seed <= detect_seeds) {
            c.mode = termination_mode::detect;
            auto d = build_sketches(in.g, in.dm, c);
            for (const auto& ch : complexity_checks(in.g, d)) complexity.add("gd-detect", ch);
        }
        if (!(is_er(in, 64) || is_er(in, 128) || is_er(in, 256))) continue;
        std::size_t n = in.g.node_count();
        auto ceil = ceilings_for(b.sketches, n);
        auto rep = make_stretch_report(
            in.dm, [&](node_id u, node_id v) { return b.sketches.estimate(u, v); }, {}, rng{in.seed}, std::nullopt,
            ceil.slack);
        ++runs;
        for (const auto& s : rep.slack_view) violations += s.violations;
        violations += rep.below_truth;
        worst_avg = std::max(worst_avg, rep.avg_stretch);
        if (rep.avg_stretch > bounds::gd_avg_stretch) ++over_avg;
        if (n == 256) {
            worst_avg_256 = std::max(worst_avg_256, rep.avg_stretch);
            worst_max_256 = std::max(worst_max_256, rep.max_stretch);
            std::uint64_t k_max = gd_level_k(n, gd_level_count(n));
            if (!(rep.max_stretch <= static_cast<double>(8 * k_max - 1))) ++over_max;
            double words = static_cast<double>(sketch_words(b.sketches).max);
            worst_words = std::max(worst_words, words / bounds::gd_word_shape(n));
            if (words > bounds::gd_words * bounds::gd_word_shape(n)) ++over_words;
        }
    }
    report(4, "gd-bounds", violations == 0 && over_max == 0 && over_avg == 0 && over_words == 0,
           std::to_string(runs) + " runs (er64/128/256); avg stretch max " + fmt(worst_avg) + " (A=" +
               fmt(bounds::gd_avg_stretch) + "), n=256 avg " + fmt(worst_avg_256) + ", n=256 max stretch " +
               fmt(worst_max_256) + " (ceiling " + std::to_string(8 * gd_level_k(256, 8) - 1) +
               "), words/ln^4 n " + fmt(worst_words) + " (C=" + fmt(bounds::gd_words) + "); per-level violations " +
               std::to_string(violations));
}

void tail_criterion() {
    auto g = make_erdos_renyi(256, 0.03, {1, 16}, rng{7});
    oracle::distance_matrix dm(g);
    const std::size_t n = 256;
    auto run = [&](std::uint32_t k, std::uint64_t salt) {
        double threshold = 3.0 * std::pow(static_cast<double>(n), 1.0 / k) * std::log(static_cast<double>(n));
        std::uint64_t events = 0, exceed = 0;
        std::size_t largest = 0;
        for (std::uint64_t t = 0; t < 1000; ++t) {
            auto levels = sample_hierarchy(n, k, rng{salt + t});
            for (const auto& l : oracle::centralized_tz(dm, levels)) {
                std::vector<std::size_t> per(k, 0);
                for (const auto& e : l.bunch) ++per[e.level];
                for (auto c : per) {
                    ++events;
                    largest = std::max(largest, c);
                    exceed += static_cast<double>(c) > threshold;
                }
            }
        }
        return std::make_tuple(static_cast<double>(exceed) / static_cast<double>(events), largest, threshold);
    };
    auto [f2, big2, t2] = run(2, 10'000);
    auto [f3, big3, t3] = run(3, 20'000);
    bool pass = f2 < 1.0 / n && f3 < 1.0 / n;
    report(7, "bunch-tail-bound", pass,
           "1000 draws at n=256: k=2 frequency " + fmt(f2) + " (threshold " + fmt(t2) + ", largest |B_i| " +
               std::to_string(big2) + "); k=3 frequency " + fmt(f3) + " (threshold " + fmt(t3) + ", largest " +
               std::to_string(big3) + "); limit 1/n = " + fmt(1.0 / n));
}

void net_criterion(const std::vector<instance>& all) {
    std::size_t nets = 0, bad_size = 0, bad_cover = 0;
    double worst_fill = 0;
    for (const auto& in : all) {
        std::size_t n = in.g.node_count();
        for (rational eps : {rational(1, 1), rational(1, 4), rational(1, 8)}) {
            auto net = build_density_net(in.dm, eps, rng{in.seed}.substream(1));
            ++nets;
            double bound = 10.0 * std::log(static_cast<double>(n)) * static_cast<double>(eps.den) / static_cast<double>(eps.num);
            worst_fill = std::max(worst_fill, static_cast<double>(net.members.size()) / bound);
            if (static_cast<double>(net.members.size()) > bound) ++bad_size;
            // R(u, eps) is the ceil(eps n)-th smallest distance from u.
            std::size_t need = static_cast<std::size_t>((eps.num * n + eps.den - 1) / eps.den);
            for (node_id u = 0; u < n; ++u) {
                std::vector<distance> row(n);
                for (node_id v = 0; v < n; ++v) row[v] = in.dm(u, v);
                std::sort(row.begin(), row.end());
                distance r = row[need - 1];
                distance nearest = infinite_distance;
                for (auto w : net.members) nearest = std::min(nearest, in.dm(u, w));
                if (nearest > r) {
                    ++bad_cover;
                    break;
                }
            }
        }
    }
    report(8, "density-net-properties", bad_size == 0 && bad_cover == 0,
           std::to_string(nets) + " nets (eps 1, 1/4, 1/8); size violations " + std::to_string(bad_size) +
               ", coverage violations " + std::to_string(bad_cover) + ", max |N| / ((10/eps) ln n) " + fmt(worst_fill));
}

// ---------------------------------------------------------------------------

int cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"dsketch"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

std::map<std::string, std::string> run_cli_suite(const fs::path& dir) {
    fs::create_directories(dir);
    auto p = [&](const std::string& f) { return (dir / f).string(); };
    std::vector<std::vector<std::string>> cmds = {
        {"gen", "er", "64", "0.1", "--seed", "7", "--wmin", "1", "--wmax", "16", "--out", p("er64.txt")},
        {"gen", "path", "4", "--out", p("p4.txt")},
        {"gen", "grid", "5", "5", "--wmin", "1", "--wmax", "9", "--seed", "2", "--out", p("grid.txt")},
        {"build", "--graph", p("p4.txt"), "--scheme", "tz", "--k", "2", "--seed", "11", "--out", p("p4-tz.bin")},
        {"build", "--graph", p("er64.txt"), "--scheme", "tz", "--k", "2", "--seed", "3", "--out", p("tz.bin")},
        {"build", "--graph", p("er64.txt"), "--scheme", "tz", "--k", "3", "--seed", "3", "--mode", "detect", "--out",
         p("tz-detect.bin")},
        {"build", "--graph", p("er64.txt"), "--scheme", "slack3", "--eps", "1/4", "--seed", "3", "--out", p("slack3.bin")},
        {"build", "--graph", p("grid.txt"), "--scheme", "cdg", "--k", "2", "--eps", "1/8", "--seed", "3", "--out",
         p("cdg.bin")},
        {"build", "--graph", p("er64.txt"), "--scheme", "gd", "--seed", "3", "--mode", "detect", "--out", p("gd.bin")},
        {"verify", "--graph", p("er64.txt"), "--sketch", p("tz.bin"), "--out", p("tz-report.json"), "--csv",
         p("tz-pairs.csv")},
        {"verify", "--graph", p("er64.txt"), "--sketch", p("gd.bin"), "--pairs", "sample:300", "--seed", "5", "--out",
         p("gd-report.json")},
    };
    std::map<std::string, std::string> files;
    for (const auto& c : cmds) {
        int code = cli(c);
        if (code != 0) files["exit:" + c[0] + ":" + c.back()] = std::to_string(code);
    }
    for (const auto& e : fs::directory_iterator(dir)) files[e.path().filename().string()] = cli::read_file(e.path().string());
    return files;
}

void determinism_criterion() {
    auto root = fs::temp_directory_path() / ("dsketch-acceptance-" + std::to_string(::getpid()));
    auto a = run_cli_suite(root / "a");
    auto b = run_cli_suite(root / "b");
    std::size_t differing = 0, failed = 0;
    for (const auto& [name, bytes] : a) {
        if (name.rfind("exit:", 0) == 0) ++failed;
        auto it = b.find(name);
        if (it == b.end() || it->second != bytes) ++differing;
    }
    if (a.size() != b.size()) ++differing;
    fs::remove_all(root);
    report(9, "cli-determinism", differing == 0 && failed == 0 && a.size() >= 20,
           std::to_string(a.size()) + " output files compared byte for byte; " + std::to_string(differing) +
               " differ, " + std::to_string(failed) + " commands failed");
}

}  // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    auto all = corpus();
    std::cout << "corpus: " << all.size() << " graphs (" << seeds_per_config
              << " seeds each of path32w, grid8x8w, er32, er64, er128, er256)" << std::endl;

    tz_criteria(all);
    slack_criterion(all);
    gd_criterion(all);
    report(5, "complexity-regression", complexity.failures == 0,
           "worst measured/shape vs frozen constant:" + complexity.summary() + "; " +
               std::to_string(complexity.failures) + " exceedances");
    tail_criterion();
    net_criterion(all);
    determinism_criterion();

    std::sort(results.begin(), results.end(), [](const verdict& x, const verdict& y) { return x.id < y.id; });
    std::size_t failed = 0;
    std::cout << "\nsummary:\n";
    for (const auto& r : results) {
        std::cout << "  " << r.id << " " << r.title << ": " << (r.pass ? "PASS" : "FAIL") << "\n";
        failed += !r.pass;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "elapsed " << fmt(secs) << " s; " << (results.size() - failed) << "/" << results.size() << " passed"
              << std::endl;
    return failed == 0 ? 0 : 1;
}
