#include <gtest/gtest.h>

#include <cmath>

#include "dsketch/generators.hpp"
#include "dsketch/oracle.hpp"
#include "dsketch/query.hpp"
#include "dsketch/stretch_report.hpp"
#include "dsketch/tz_protocol.hpp"
#include "test_support.hpp"

using namespace dsketch;
using namespace dsketch::testing;

namespace {

// The query procedure recomputed from distances and levels alone: at each i,
// test both pivot directions against the bunch definition and keep the
// smaller witnessed sum.
distance brute_tz_estimate(const oracle::distance_matrix& dm, const level_assignment& levels, node_id u, node_id v) {
    std::size_t n = dm.node_count();
    auto pivot_of = [&](node_id x, std::uint32_t i) {
        dist_key best;
        for (node_id w = 0; w < n; ++w)
            if (levels.in_level(w, i)) best = std::min(best, dist_key{dm(x, w), w});
        return best;
    };
    auto in_bunch_i = [&](node_id x, node_id w, std::uint32_t i) {
        if (levels.level[w] != static_cast<std::int32_t>(i)) return false;
        dist_key bound = i + 1 < levels.k ? pivot_of(x, i + 1) : infinite_key;
        return dist_key{dm(x, w), w} < bound;
    };
    for (std::uint32_t i = 0; i < levels.k; ++i) {
        distance best = infinite_distance;
        auto pu = pivot_of(u, i).node;
        auto pv = pivot_of(v, i).node;
        if (in_bunch_i(v, pu, i)) best = std::min(best, dm(u, pu) + dm(v, pu));
        if (in_bunch_i(u, pv, i)) best = std::min(best, dm(u, pv) + dm(v, pv));
        if (best != infinite_distance) return best;
    }
    return infinite_distance;
}

}  // namespace

TEST(TzEstimate, SelfIsZero) {
    auto g = make_grid(4, 4);
    auto res = build_tz_sketches(g, 2, rng{3}, build_mode::fixed(6));
    for (const auto& l : res.labels) EXPECT_EQ(tz_estimate(l, l), 0u);
}

TEST(TzEstimate, KEqualsOneIsExact) {
    auto res = build_tz_sketches(p3(), 1, rng{1}, build_mode::fixed(2));
    EXPECT_EQ(tz_estimate(res.labels[0], res.labels[2]), 2u);
}

TEST(TzEstimate, PathOfFourSeedEleven) {
    auto g = p4();
    oracle::distance_matrix dm(g);
    auto res = build_tz_sketches(g, 2, rng{11}, build_mode::fixed(3));
    distance e = tz_estimate(res.labels[0], res.labels[3]);
    EXPECT_EQ(e, brute_tz_estimate(dm, res.levels, 0, 3));
    EXPECT_GE(e, 3u);
    EXPECT_LE(e, 9u);
    // Frozen from the shared-coin-flip run.
    EXPECT_EQ(e, 3u);
}

TEST(TzEstimate, MatchesBruteForceAndIsSymmetric) {
    std::uint64_t seed = 300;
    for (const auto& [name, g] : small_corpus()) {
        oracle::distance_matrix dm(g);
        std::size_t n = g.node_count();
        for (std::uint32_t k = 1; k <= 3; ++k) {
            auto levels = sample_hierarchy(n, k, rng{++seed});
            auto labels = oracle::centralized_tz(dm, levels);
            for (node_id u = 0; u < n; ++u)
                for (node_id v = 0; v < n; ++v) {
                    distance e = tz_estimate(labels[u], labels[v]);
                    ASSERT_EQ(e, brute_tz_estimate(dm, levels, u, v)) << name;
                    ASSERT_EQ(e, tz_estimate(labels[v], labels[u]));
                    ASSERT_GE(e, dm(u, v));
                    ASSERT_LE(e, (2 * k - 1) * dm(u, v)) << name << " k=" << k;
                }
        }
    }
}

TEST(TzEstimate, SymmetricAtN128) {
    auto g = make_erdos_renyi(128, 0.05, {1, 16}, rng{12});
    oracle::distance_matrix dm(g);
    auto res = build_tz_sketches(g, 3, rng{12}, build_mode::fixed(oracle::shortest_path_diameter(g)));
    for (node_id u = 0; u < 128; ++u)
        for (node_id v = u; v < 128; ++v) EXPECT_EQ(tz_estimate(res.labels[u], res.labels[v]), tz_estimate(res.labels[v], res.labels[u]));
}

TEST(TzEstimate, IncompatibleLabels) {
    tz_label a{0, 1, {{0, 0}}, {{0, 0, 0}}};
    tz_label b{1, 2, {{1, 0}, {1, 0}}, {{1, 1, 0}}};
    try {
        tz_estimate(a, b);
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.kind(), error_kind::incompatible);
        EXPECT_EQ(std::string(e.what()), "incompatible labels");
    }
}

TEST(Slack3Estimate, ExamplesAndMismatch) {
    slack3_sketch s0{0, {{0, 0}, {1, 1}, {2, 2}}};
    slack3_sketch s2{2, {{0, 2}, {1, 1}, {2, 0}}};
    EXPECT_EQ(slack3_estimate(s0, s2), 2u);
    slack3_sketch other{2, {{0, 2}, {2, 0}}};
    EXPECT_THROW(slack3_estimate(s0, other), error);
    slack3_sketch shifted{2, {{0, 2}, {3, 1}, {2, 0}}};
    EXPECT_THROW(slack3_estimate(s0, shifted), error);
}

TEST(StretchReport, ExactEstimator) {
    auto g = make_grid(4, 5);
    oracle::distance_matrix dm(g);
    auto rep = make_stretch_report(dm, [&](node_id u, node_id v) { return dm(u, v); }, {}, rng{1}, 1,
                                   {{rational(1, 4), 1}});
    EXPECT_EQ(rep.pairs.size(), 190u);
    EXPECT_EQ(rep.max_stretch, 1.0);
    EXPECT_EQ(rep.avg_stretch, 1.0);
    EXPECT_TRUE(rep.passed());
    ASSERT_EQ(rep.slack_view.size(), 1u);
    EXPECT_EQ(rep.slack_view[0].far_pairs + rep.slack_view[0].near_pairs, 380u);
}

TEST(StretchReport, DoublingEstimator) {
    auto g = make_path(9, {1, 5}, rng{2});
    oracle::distance_matrix dm(g);
    auto rep = make_stretch_report(dm, [&](node_id u, node_id v) { return 2 * dm(u, v); }, {}, rng{1}, 1);
    EXPECT_EQ(rep.max_stretch, 2.0);
    EXPECT_EQ(rep.avg_stretch, 2.0);
    EXPECT_EQ(rep.ceiling_violations, 2 * rep.pairs.size());
    EXPECT_FALSE(rep.passed());
}

TEST(StretchReport, UnderestimatesAreFlagged) {
    auto g = make_path(5);
    oracle::distance_matrix dm(g);
    auto rep = make_stretch_report(dm, [&](node_id u, node_id v) { return dm(u, v) / 2; }, {}, rng{1});
    EXPECT_GT(rep.below_truth, 0u);
    EXPECT_FALSE(rep.passed());
}

TEST(StretchReport, SlackViewSeparatesNearPairs) {
    // Overestimate only the pairs that are not 1/2-far.
    auto g = make_path(8);
    oracle::distance_matrix dm(g);
    auto far = oracle::epsilon_far_matrix(dm, rational(1, 2));
    auto rep = make_stretch_report(
        dm, [&](node_id u, node_id v) { return far[u * 8 + v] ? dm(u, v) : 5 * dm(u, v); }, {}, rng{1}, std::nullopt,
        {{rational(1, 2), 1}});
    EXPECT_EQ(rep.slack_view[0].violations, 0u);
    EXPECT_EQ(rep.slack_view[0].far_max, 1.0);
    EXPECT_EQ(rep.slack_view[0].near_max, 5.0);
    EXPECT_TRUE(rep.passed());
}

TEST(StretchReport, SamplingIsSeededAndDistinct) {
    auto a = select_pairs(50, pair_policy::parse("sample:40"), rng{4});
    auto b = select_pairs(50, pair_policy::parse("sample:40"), rng{4});
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.size(), 40u);
    for (auto [u, v] : a) EXPECT_LT(u, v);
    EXPECT_EQ(select_pairs(5, pair_policy::parse("sample:100"), rng{4}).size(), 10u);
    EXPECT_THROW(pair_policy::parse("some"), error);
    EXPECT_THROW(pair_policy::parse("sample:0"), error);
}

TEST(StretchReport, ZeroDistancePairs) {
    EXPECT_EQ(stretch_ratio(0, 0), 1.0);
    EXPECT_TRUE(std::isinf(stretch_ratio(1, 0)));
    EXPECT_TRUE(within(0, 0, 3));
    EXPECT_FALSE(within(1, 0, 3));
}
