#include <gtest/gtest.h>

#include <random>

#include "evkws/error.hpp"
#include "evkws/graph.hpp"
#include "oracles/generators.hpp"

using namespace evkws;

namespace {

std::vector<std::pair<int, std::uint32_t>> summary(const NeighborSet& ns) {
    std::vector<std::pair<int, std::uint32_t>> out;
    for (const auto& n : ns.neighbors) out.emplace_back(n.event.c, n.dt);
    return out;
}

GraphParams random_params(std::mt19937_64& rng) {
    GraphParams p;
    p.r_c = static_cast<std::uint32_t>(rng() % 25);
    p.skip_step = 1 + static_cast<std::uint32_t>(rng() % 4);
    p.r_t_low = static_cast<std::uint32_t>(rng() % 3 == 0 ? 0 : rng() % 400);
    p.r_t_high = p.r_t_low + static_cast<std::uint32_t>(rng() % 6000);
    p.same_channel = rng() % 2;
    return p;
}

}  // namespace

TEST(Graph, FirstEventHasNoNeighbors) {
    GraphBuilder b(64, {});
    EXPECT_TRUE(b.insert({0, 10, 1}).neighbors.empty());
}

TEST(Graph, UnitRadiusExample) {
    GraphParams p{1, 1, 0, 5000, true};
    GraphBuilder b(64, p);
    b.insert({100, 4, 1});
    b.insert({200, 5, 1});
    const auto ns = b.insert({300, 5, 1});
    EXPECT_EQ(summary(ns), (std::vector<std::pair<int, std::uint32_t>>{{4, 200}, {5, 100}}));
    EXPECT_EQ(ns.neighbors[0].dc, -1);
    EXPECT_EQ(ns.neighbors[1].dc, 0);
}

TEST(Graph, UnitRadiusExampleDefaultExcludesOwnChannel) {
    GraphParams p{1, 1, 0, 5000};
    GraphBuilder b(64, p);
    b.insert({100, 4, 1});
    b.insert({200, 5, 1});
    EXPECT_EQ(summary(b.insert({300, 5, 1})), (std::vector<std::pair<int, std::uint32_t>>{{4, 200}}));
}

TEST(Graph, UpperTimeRadiusExcludes) {
    GraphBuilder b(64, {});
    b.insert({0, 10, 1});
    EXPECT_TRUE(b.insert({6000, 12, 1}).neighbors.empty());
    GraphBuilder edge(64, {});
    edge.insert({0, 10, 1});
    EXPECT_EQ(edge.insert({5000, 12, 1}).neighbors.size(), 1u);
}

TEST(Graph, LowerTimeRadiusInclusive) {
    GraphParams p{4, 1, 100, 5000};
    GraphBuilder b(64, p);
    b.insert({0, 1, 1});
    b.insert({50, 2, 1});
    EXPECT_EQ(summary(b.insert({100, 3, 1})), (std::vector<std::pair<int, std::uint32_t>>{{1, 100}}));
}

TEST(Graph, SkipStepGeometry) {
    GraphParams p{4, 2, 0, 5000};
    GraphBuilder b(64, p);
    for (std::uint16_t c = 6; c <= 14; ++c) b.insert({0, c, 1});
    EXPECT_EQ(summary(b.insert({10, 10, 1})),
              (std::vector<std::pair<int, std::uint32_t>>{{6, 10}, {8, 10}, {12, 10}, {14, 10}}));
}

TEST(Graph, ChannelEdgesClip) {
    GraphParams p{3, 1, 0, 5000};
    GraphBuilder b(32, p);
    for (std::uint16_t c = 0; c < 32; ++c) b.insert({0, c, 1});
    EXPECT_EQ(b.insert({1, 0, 1}).neighbors.size(), 3u);
    EXPECT_EQ(b.insert({1, 31, 1}).neighbors.size(), 3u);
}

TEST(Graph, DegreeNeverExceedsTwenty) {
    GraphParams p{10, 1, 0, 5000};
    GraphBuilder b(128, p);
    std::mt19937_64 rng(5);
    std::uint32_t t = 0;
    for (int i = 0; i < 20000; ++i) {
        t += rng() % 3;
        EXPECT_LE(b.insert({t, static_cast<std::uint16_t>(rng() % 128), 1}).neighbors.size(), 20u);
    }
    EXPECT_EQ(p.max_neighbors(), 20u);
}

TEST(Graph, SameTimestampSameChannel) {
    GraphParams p{2, 1, 0, 5000, true};
    GraphBuilder b(32, p);
    b.insert({7, 3, 1});
    EXPECT_EQ(summary(b.insert({7, 3, -1})), (std::vector<std::pair<int, std::uint32_t>>{{3, 0}}));
    EXPECT_EQ(b.latest(3)->p, -1);
}

TEST(Graph, OutOfOrderInsertThrows) {
    GraphBuilder b(32, {});
    b.insert({100, 3, 1});
    EXPECT_THROW(b.insert({99, 4, 1}), OrderingError);
    EXPECT_THROW(b.insert({100, 32, 1}), ValidationError);
}

TEST(Graph, InvalidParams) {
    EXPECT_THROW(GraphBuilder(32, GraphParams{2, 0, 0, 10}), ValidationError);
    EXPECT_THROW(GraphBuilder(32, GraphParams{2, 1, 20, 10}), ValidationError);
}

TEST(Graph, ResetForgetsHistory) {
    GraphBuilder b(32, {});
    b.insert({100, 3, 1});
    b.reset();
    EXPECT_TRUE(b.insert({50, 5, 1}).neighbors.empty());
}

TEST(Graph, QueryDoesNotRecord) {
    GraphBuilder b(32, {});
    b.insert({0, 3, 1});
    EXPECT_EQ(b.query({10, 5, 1}).neighbors.size(), 1u);
    EXPECT_FALSE(b.latest(5).has_value());
}

TEST(BruteForce, SingleEventHistory) {
    const std::vector<Event> h{{10, 4, 1}};
    const auto ns = brute_force_neighbors(h, {20, 6, 1}, {});
    EXPECT_EQ(summary(ns), (std::vector<std::pair<int, std::uint32_t>>{{4, 10}}));
}

TEST(BruteForce, LaterEventOnChannelWins) {
    const std::vector<Event> h{{10, 4, 1}, {15, 4, -1}};
    const auto ns = brute_force_neighbors(h, {20, 6, 1}, {});
    EXPECT_EQ(summary(ns), (std::vector<std::pair<int, std::uint32_t>>{{4, 5}}));
}

TEST(Graph, JsonDump) {
    GraphBuilder b(32, {});
    b.insert({0, 3, 1});
    const auto j = to_json(b.insert({10, 5, 1}));
    EXPECT_EQ(j.dump(), R"({"c":5,"neighbors":[{"c":3,"dt":10}],"t":10})");
}

TEST(GraphProperties, OracleEquivalence) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 24; ++trial) {
        const unsigned channels = testgen::random_channels(rng);
        const auto s = testgen::random_stream(rng, channels, trial < 4 ? 10000 : 1500, 1 + rng() % 300);
        const auto p = random_params(rng);
        GraphBuilder b(channels, p);
        for (std::size_t i = 0; i < s.events.size(); ++i) {
            const auto got = b.insert(s.events[i]);
            const auto want = brute_force_neighbors(std::span(s.events).first(i), s.events[i], p);
            ASSERT_EQ(got, want) << "trial " << trial << " event " << i;
        }
    }
}

TEST(GraphProperties, DegreeCausalityOverwrite) {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 40; ++trial) {
        const unsigned channels = testgen::random_channels(rng);
        const auto s = testgen::random_stream(rng, channels, 2000, 50);
        const auto p = random_params(rng);
        GraphBuilder b(channels, p);
        // index of the latest inserted event per channel
        std::vector<long> latest_idx(channels, -1);
        for (std::size_t i = 0; i < s.events.size(); ++i) {
            const auto ns = b.insert(s.events[i]);
            EXPECT_LE(ns.neighbors.size(), p.max_neighbors());
            if (!p.same_channel) EXPECT_LE(ns.neighbors.size(), 2 * (p.r_c / p.skip_step));
            for (const auto& n : ns.neighbors) {
                EXPECT_GE(n.dt, p.r_t_low);
                EXPECT_LE(n.dt, p.r_t_high);
                EXPECT_EQ(n.dt, s.events[i].t - n.event.t);
                EXPECT_EQ(n.dc % static_cast<std::int32_t>(p.skip_step), 0);
                EXPECT_LE(std::abs(n.dc), static_cast<int>(p.r_c));
                EXPECT_EQ(n.event, s.events[static_cast<std::size_t>(latest_idx[n.event.c])]);
            }
            latest_idx[s.events[i].c] = static_cast<long>(i);
        }
    }
}

TEST(GraphProperties, EdgeCountsMatchReplay) {
    std::mt19937_64 rng(47);
    const auto s = testgen::random_stream(rng, 64, 3000);
    const GraphParams p{10, 1, 0, 5000};
    const auto counts = edge_counts(s, p);
    GraphBuilder b(64, p);
    ASSERT_EQ(counts.size(), s.events.size());
    for (std::size_t i = 0; i < counts.size(); ++i) EXPECT_EQ(counts[i], b.insert(s.events[i]).neighbors.size());
}
