#pragma once

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dsketch/build.hpp"
#include "dsketch/error.hpp"
#include "dsketch/generators.hpp"
#include "dsketch/graph.hpp"
#include "dsketch/oracle.hpp"
#include "dsketch/serialize.hpp"
#include "dsketch/stretch_report.hpp"

namespace dsketch::cli {

enum exit_code : int {
    ok = 0,
    failed = 1,  // a declared ceiling or invariant does not hold
    usage = 2,
    io = 3,
    parse = 4,
    graph_error = 5,
    round_limit = 6,
    retry_budget = 7,
};

inline int code_for(error_kind k) {
    switch (k) {
        case error_kind::parse: return parse;
        case error_kind::graph: return graph_error;
        case error_kind::round_limit: return round_limit;
        case error_kind::retry_budget: return retry_budget;
        case error_kind::incompatible: return failed;
        case error_kind::invalid_argument: return usage;
        case error_kind::io: return io;
    }
    return failed;
}

inline constexpr int metrics_schema_version = 1;
inline constexpr int report_schema_version = 1;

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error(error_kind::io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size())))
        throw error(error_kind::io, "cannot write '" + path + "'");
}

inline graph read_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error(error_kind::io, "cannot open '" + path + "'");
    return load_edge_list(in);
}

inline std::uint64_t parse_count(const std::string& s, const char* what) {
    auto r = parse_rational(s);
    if (r.den != 1) throw error(error_kind::invalid_argument, std::string(what) + " must be an integer");
    return r.num;
}

inline termination_mode parse_mode(const std::string& s) {
    if (s == "fixed_S") return termination_mode::fixed_s;
    if (s == "detect") return termination_mode::detect;
    throw error(error_kind::invalid_argument, "unknown mode '" + s + "' (expected fixed_S or detect)");
}

struct gen_options {
    std::string kind;
    std::vector<std::string> args;
    std::uint64_t seed = 1;
    distance wmin = 1;
    distance wmax = 1;
    std::string out;
};

struct build_options {
    std::string graph;
    std::string scheme = "tz";
    std::optional<std::uint32_t> k;
    std::optional<std::string> eps;
    std::uint64_t seed = 1;
    std::string mode = "fixed_S";
    std::string out;
    std::string metrics;
};

struct query_options {
    std::string sketch;
    std::uint64_t u = 0;
    std::uint64_t v = 0;
};

struct verify_options {
    build_options build;
    std::string sketch;
    std::string pairs = "all";
    std::string out;
    std::string csv;
};

inline build_config to_config(const build_options& o) {
    build_config c;
    c.kind = parse_scheme(o.scheme);
    c.k = o.k;
    if (o.eps) c.eps = parse_rational(*o.eps);
    c.seed = o.seed;
    c.mode = parse_mode(o.mode);
    return c;
}

inline int cmd_gen(const gen_options& o, std::ostream& out) {
    generator_params gp;
    gp.kind = parse_graph_kind(o.kind);
    gp.w = {o.wmin, o.wmax};
    auto want = [&](std::size_t count, const char* shape) {
        if (o.args.size() != count)
            throw error(error_kind::invalid_argument, "gen " + o.kind + " expects " + shape);
    };
    switch (gp.kind) {
        case graph_kind::path:
            want(1, "N");
            gp.n = parse_count(o.args[0], "N");
            break;
        case graph_kind::grid:
            want(2, "ROWS COLS");
            gp.rows = parse_count(o.args[0], "ROWS");
            gp.cols = parse_count(o.args[1], "COLS");
            break;
        case graph_kind::erdos_renyi:
            want(2, "N P");
            gp.n = parse_count(o.args[0], "N");
            gp.p = parse_rational(o.args[1]).value();
            break;
        case graph_kind::random_weighted:
            want(2, "N EXTRA_EDGES");
            gp.n = parse_count(o.args[0], "N");
            gp.extra = parse_count(o.args[1], "EXTRA_EDGES");
            break;
    }
    auto g = generate(gp, rng(o.seed));
    if (o.out.empty()) write_edge_list(out, g);
    else write_file(o.out, to_edge_list(g));
    return ok;
}

inline json metrics_json(const graph& g, const build_config& c, const built_sketches& b,
                         const std::vector<bounds::check>& checks) {
    json per_phase = json::array();
    for (const auto& p : b.metrics.per_phase()) per_phase.push_back(phase_json(p));
    json bound_checks = json::array();
    for (const auto& ch : checks)
        bound_checks.push_back({{"name", ch.name},
                                {"measured", ch.measured},
                                {"constant", ch.constant},
                                {"bound", ch.bound()},
                                {"ok", ch.ok()}});
    auto words = sketch_words(b.sketches);
    return {{"schema_version", metrics_schema_version},
            {"n", g.node_count()},
            {"m", g.edge_count()},
            {"S", b.S},
            {"D", oracle::hop_diameter(g)},
            {"scheme", to_string(c.kind)},
            {"k", c.k ? json(*c.k) : json(nullptr)},
            {"eps", c.eps ? json(c.eps->str()) : json(nullptr)},
            {"seed", c.seed},
            {"mode", to_string(c.mode)},
            {"rounds", b.metrics.rounds()},
            {"data_msgs", b.metrics.data_msgs()},
            {"control_msgs", b.metrics.control_msgs()},
            {"per_phase", per_phase},
            {"sketch_words", {{"max", words.max}, {"mean", words.mean}}},
            {"bound_checks", bound_checks}};
}

inline int cmd_build(const build_options& o, std::ostream& out, std::ostream& err) {
    auto c = to_config(o);
    check_config(c);
    auto g = read_graph(o.graph);
    oracle::distance_matrix dm(g);
    auto b = build_sketches(g, dm, c);
    auto checks = complexity_checks(g, b);
    write_file(o.out, encode_sketches(b.sketches));
    write_file(o.out + ".json", sketches_json(b.sketches).dump(1) + "\n");
    write_file(o.metrics.empty() ? o.out + ".metrics.json" : o.metrics, metrics_json(g, c, b, checks).dump(1) + "\n");
    out << "built " << to_string(c.kind) << " sketches: n=" << g.node_count() << " m=" << g.edge_count()
        << " S=" << b.S << " rounds=" << b.metrics.rounds() << " data_msgs=" << b.metrics.data_msgs()
        << " control_msgs=" << b.metrics.control_msgs() << " max_words=" << sketch_words(b.sketches).max << "\n";
    int code = ok;
    for (const auto& ch : checks) {
        if (ch.ok()) continue;
        err << "bound exceeded: " << ch.name << " = " << ch.measured << " > " << ch.bound() << "\n";
        code = failed;
    }
    return code;
}

inline int cmd_query(const query_options& o, std::ostream& out) {
    auto s = decode_sketches(read_file(o.sketch));
    if (o.u >= s.size() || o.v >= s.size())
        throw error(error_kind::invalid_argument, "node out of range (sketch file has " + std::to_string(s.size()) + " nodes)");
    out << s.estimate(static_cast<node_id>(o.u), static_cast<node_id>(o.v)) << "\n";
    return ok;
}

inline json report_json(const sketch_set& s, const pair_policy& policy, const stretch_report& rep) {
    json slack = json::object();
    for (const auto& v : rep.slack_view)
        slack[v.eps.str()] = {{"ceiling", v.ceiling},
                              {"max", v.far_max},
                              {"violations", v.violations},
                              {"far_pairs", v.far_pairs},
                              {"near_pairs", v.near_pairs},
                              {"near_max", v.near_max}};
    return {{"schema_version", report_schema_version},
            {"scheme", to_string(s.kind)},
            {"k", s.k},
            {"eps", s.eps.str()},
            {"n", s.size()},
            {"pair_policy", policy.str()},
            {"pairs", rep.pairs.size()},
            {"max_stretch", rep.max_stretch},
            {"avg_stretch", rep.avg_stretch},
            {"below_truth", rep.below_truth},
            {"asymmetric", rep.asymmetric},
            {"ceiling", rep.ceiling ? json(*rep.ceiling) : json(nullptr)},
            {"ceiling_violations", rep.ceiling_violations},
            {"slack_view", slack},
            {"passed", rep.passed()}};
}

inline int cmd_verify(const verify_options& o, std::ostream& out, std::ostream& err) {
    auto policy = pair_policy::parse(o.pairs);
    auto g = read_graph(o.build.graph);
    oracle::distance_matrix dm(g);
    std::size_t n = g.node_count();
    auto violated = [&](const std::string& why) {
        err << "invariant violated: " << why << "\n";
        return failed;
    };

    sketch_set s;
    if (!o.sketch.empty()) {
        auto bytes = read_file(o.sketch);
        try {
            s = decode_sketches(bytes);
        } catch (const error& e) {
            return violated(e.what());
        }
    } else {
        s = build_sketches(g, dm, to_config(o.build)).sketches;
    }
    if (auto problems = check_sketches(s, n); !problems.empty()) return violated(problems.front());

    auto ceil = ceilings_for(s, n);
    stretch_report rep;
    try {
        rep = make_stretch_report(
            dm, [&](node_id u, node_id v) { return s.estimate(u, v); }, policy, rng(o.build.seed), ceil.all_pairs,
            ceil.slack);
    } catch (const error& e) {
        return violated(e.what());
    }
    if (!o.out.empty()) write_file(o.out, report_json(s, policy, rep).dump(1) + "\n");
    if (!o.csv.empty()) {
        std::ostringstream csv;
        write_pairs_csv(csv, rep);
        write_file(o.csv, csv.str());
    }

    out << std::setprecision(6) << to_string(s.kind) << ": pairs=" << rep.pairs.size() << " max_stretch=" << rep.max_stretch
        << " avg_stretch=" << rep.avg_stretch << "\n";
    if (rep.ceiling)
        out << "  all pairs: ceiling " << *rep.ceiling << ", violations " << rep.ceiling_violations << "\n";
    for (const auto& v : rep.slack_view)
        out << "  eps=" << v.eps.str() << ": far pairs " << v.far_pairs << ", max " << v.far_max << " (ceiling "
            << v.ceiling << "), violations " << v.violations << "; near pairs " << v.near_pairs << ", max "
            << v.near_max << "\n";
    if (rep.below_truth > 0) return violated(std::to_string(rep.below_truth) + " estimates below the true distance");
    if (!rep.passed()) return violated("stretch ceiling exceeded");
    out << "PASS\n";
    return ok;
}

inline void add_build_flags(CLI::App* app, build_options& o, bool graph_required) {
    app->add_option("--graph", o.graph, "edge-list file")->required(graph_required);
    app->add_option("--scheme", o.scheme, "tz, slack3, cdg or gd");
    app->add_option("--k", o.k, "hierarchy depth (tz, cdg)");
    app->add_option("--eps", o.eps, "slack as a fraction, e.g. 1/4 (slack3, cdg)");
    app->add_option("--seed", o.seed, "rng seed");
    app->add_option("--mode", o.mode, "fixed_S or detect");
}

// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Distributed distance sketches on a simulated CONGEST network", "dsketch"};
    app.require_subcommand(1);

    gen_options gen;
    auto* g = app.add_subcommand("gen", "generate a graph as an edge list");
    g->add_option("kind", gen.kind, "path | grid | er | rw")->required();
    g->add_option("params", gen.args, "path N | grid ROWS COLS | er N P | rw N EXTRA_EDGES")->required();
    g->add_option("--seed", gen.seed, "rng seed");
    g->add_option("--wmin", gen.wmin, "smallest edge weight");
    g->add_option("--wmax", gen.wmax, "largest edge weight");
    g->add_option("--out", gen.out, "output file (default: standard output)");

    build_options build;
    auto* b = app.add_subcommand("build", "run a distributed construction and write sketches plus metrics");
    add_build_flags(b, build, true);
    b->add_option("--out", build.out, "sketch file; <out>.json and <out>.metrics.json are written alongside")->required();
    b->add_option("--metrics", build.metrics, "metrics file (default: <out>.metrics.json)");

    query_options query;
    auto* q = app.add_subcommand("query", "estimate d(u, v) from a sketch file");
    q->add_option("sketch", query.sketch, "sketch file")->required();
    q->add_option("u", query.u)->required();
    q->add_option("v", query.v)->required();

    verify_options verify;
    auto* v = app.add_subcommand("verify", "compare sketch estimates with exact distances");
    add_build_flags(v, verify.build, true);
    v->add_option("--sketch", verify.sketch, "sketch file (default: build in-process from the flags)");
    v->add_option("--pairs", verify.pairs, "all or sample:m");
    v->add_option("--out", verify.out, "stretch report JSON");
    v->add_option("--csv", verify.csv, "per-pair CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? ok : usage;
    }

    try {
        if (*g) return cmd_gen(gen, out);
        if (*b) return cmd_build(build, out, err);
        if (*q) return cmd_query(query, out);
        return cmd_verify(verify, out, err);
    } catch (const error& e) {
        err << "error: " << e.what() << "\n";
        return code_for(e.kind());
    }
}

}  // namespace dsketch::cli
