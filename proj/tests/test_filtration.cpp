#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "evkws/error.hpp"
#include "evkws/filtration.hpp"
#include "oracles/filtration_oracle.hpp"
#include "oracles/generators.hpp"

using namespace evkws;

namespace {

EventStream channel0(std::initializer_list<std::uint32_t> times) {
    EventStream s;
    s.config = {32, Topology::cascade};
    for (auto t : times) s.events.push_back({t, 0, 1});
    return s;
}

FiltrationParams uniform(std::uint32_t div, std::uint32_t w, std::uint32_t theta, unsigned channels = 32) {
    return {div, w, std::vector<std::uint32_t>(channels, theta)};
}

std::vector<std::uint32_t> times_of(const EventStream& s) {
    std::vector<std::uint32_t> t;
    for (const auto& e : s.events) t.push_back(e.t);
    return t;
}

}  // namespace

TEST(Thresholds, Constant) {
    EXPECT_EQ(make_thresholds({ScheduleKind::constant, 48, 16}, 4), (std::vector<std::uint32_t>{48, 48, 48, 48}));
}

TEST(Thresholds, LinearMidpoint) {
    EXPECT_EQ(make_thresholds({ScheduleKind::linear, 48, 16}, 3), (std::vector<std::uint32_t>{48, 32, 16}));
}

TEST(Thresholds, ExponentialGeometricMidpoint) {
    // 64 * 0.5^0.5 = 45.25 -> 45
    EXPECT_EQ(make_thresholds({ScheduleKind::exponential, 64, 32}, 3), (std::vector<std::uint32_t>{64, 45, 32}));
}

TEST(Thresholds, DegenerateAndEdgeCases) {
    for (auto kind : {ScheduleKind::constant, ScheduleKind::linear, ScheduleKind::exponential}) {
        EXPECT_EQ(make_thresholds({kind, 40, 40}, 64), std::vector<std::uint32_t>(64, 40));
        EXPECT_EQ(make_thresholds({kind, 64, 32}, 1), std::vector<std::uint32_t>{64});
        EXPECT_THROW(make_thresholds({kind, 0, 32}, 8), ValidationError);
        EXPECT_THROW(make_thresholds({kind, 32, 0}, 8), ValidationError);
    }
    const auto th = make_thresholds({ScheduleKind::exponential, 64, 32}, 64);
    EXPECT_EQ(th.front(), 64u);
    EXPECT_EQ(th.back(), 32u);
    EXPECT_TRUE(std::is_sorted(th.rbegin(), th.rend()));
}

TEST(FilterStream, EmptyStream) {
    EXPECT_TRUE(filter_stream(channel0({}), uniform(8, 32, 64)).events.empty());
}

TEST(FilterStream, ThresholdAtWeightDisablesFiltration) {
    std::mt19937_64 rng(3);
    const auto s = testgen::random_stream(rng, 32, 2000);
    EXPECT_EQ(filter_stream(s, uniform(8, 32, 32)).events, s.events);
}

TEST(FilterStream, HandTraceAcceptsMiddleEvent) {
    // v: 32 (reject), 32 - floor(100/256) + 32 = 64 (accept, reset), 0 - 0 + 32 = 32 (reject)
    EXPECT_EQ(times_of(filter_stream(channel0({0, 100, 300}), uniform(8, 32, 64))),
              (std::vector<std::uint32_t>{100}));
}

TEST(FilterStream, HandTraceDecayRejects) {
    // v: 32, then 32 - floor(1000/256) = 29, + 32 = 61 < 64
    EXPECT_TRUE(filter_stream(channel0({0, 1000}), uniform(8, 32, 64)).events.empty());
    FiltrationState st(32);
    const auto p = uniform(8, 32, 64);
    EXPECT_FALSE(filter_step(st, {0, 0, 1}, p));
    EXPECT_FALSE(filter_step(st, {1000, 0, 1}, p));
    EXPECT_EQ(st.v[0], 61u);
}

TEST(FilterStep, FreshStateAccepts) {
    FiltrationState st(32);
    EXPECT_TRUE(filter_step(st, {7, 3, -1}, uniform(8, 32, 16)));
    EXPECT_EQ(st.v[3], 0u);
    EXPECT_EQ(st.t_last[3], 7u);
}

TEST(FilterStep, ZeroWeightNeverAccepts) {
    FiltrationState st(32);
    const auto p = uniform(0, 0, 1);
    for (std::uint32_t t = 0; t < 100; ++t) EXPECT_FALSE(filter_step(st, {t, 0, 1}, p));
}

TEST(FilterStep, SameTimestampAccumulates) {
    FiltrationState st(32);
    const auto p = uniform(8, 32, 96);
    EXPECT_FALSE(filter_step(st, {50, 0, 1}, p));
    EXPECT_FALSE(filter_step(st, {50, 0, 1}, p));
    EXPECT_TRUE(filter_step(st, {50, 0, 1}, p));
}

TEST(FilterStep, TimeRegressionThrows) {
    FiltrationState st(32);
    const auto p = uniform(8, 32, 96);
    filter_step(st, {50, 0, 1}, p);
    EXPECT_THROW(filter_step(st, {49, 0, 1}, p), OrderingError);
    EXPECT_NO_THROW(filter_step(st, {49, 1, 1}, p));
}

TEST(FilterStep, PotentialOverflowIsAnError) {
    FiltrationState st(1);
    FiltrationParams p{32, 0xF0000000u, {0xFFFFFFFFu}};
    EXPECT_FALSE(filter_step(st, {0, 0, 1}, p));
    EXPECT_THROW(filter_step(st, {1, 0, 1}, p), OverflowError);
}

TEST(FilterStream, ValidatesThresholdCount) {
    EXPECT_THROW(filter_stream(channel0({1}), uniform(8, 32, 64, 64)), ValidationError);
}

TEST(FilterStream, PolarityIgnored) {
    auto s = channel0({0, 100, 300});
    auto flipped = s;
    for (auto& e : flipped.events) e.p = -1;
    EXPECT_EQ(times_of(filter_stream(s, uniform(8, 32, 64))), times_of(filter_stream(flipped, uniform(8, 32, 64))));
}

// Property tests over random streams.

TEST(FiltrationProperties, MatchesReferenceTranscription) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const unsigned channels = testgen::random_channels(rng);
        const auto s = testgen::random_stream(rng, channels, rng() % 400);
        const ThresholdSchedule sched{static_cast<ScheduleKind>(rng() % 3), 16 + static_cast<std::uint32_t>(rng() % 64),
                                      1 + static_cast<std::uint32_t>(rng() % 40)};
        const auto p = FiltrationParams::from_schedule(rng() % 12, rng() % 48, sched, channels);
        const auto got = filter_stream(s, p).events;
        EXPECT_EQ(got, oracle::filter_reference(s.events, channels, p.div_factor, p.weight, p.thresholds));
    }
}

TEST(FiltrationProperties, SubsequenceFoldAndDeterminism) {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 100; ++trial) {
        const unsigned channels = testgen::random_channels(rng);
        const auto s = testgen::random_stream(rng, channels, 300);
        const auto p = FiltrationParams::from_schedule(rng() % 10, 8 + rng() % 40, {ScheduleKind::linear, 64, 16}, channels);
        const auto out = filter_stream(s, p);
        // Subsequence of the input.
        std::size_t j = 0;
        for (const auto& e : s.events) {
            if (j < out.events.size() && e == out.events[j]) ++j;
        }
        EXPECT_EQ(j, out.events.size());
        // Left fold of filter_step.
        FiltrationState st(channels);
        std::vector<Event> fold;
        for (const auto& e : s.events) {
            if (filter_step(st, e, p)) fold.push_back(e);
        }
        EXPECT_EQ(fold, out.events);
        EXPECT_EQ(filter_stream(s, p).events, out.events);
    }
}

TEST(FiltrationProperties, ChannelPartitionThenMerge) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const unsigned channels = testgen::random_channels(rng);
        const auto s = testgen::random_stream(rng, channels, 500);
        const auto p = FiltrationParams::from_schedule(8, 32, {ScheduleKind::exponential, 64, 32}, channels);
        const auto direct = filter_stream(s, p).events;
        std::vector<bool> keep(s.events.size(), false);
        for (unsigned c = 0; c < channels; ++c) {
            EventStream sub;
            sub.config = s.config;
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < s.events.size(); ++i) {
                if (s.events[i].c == c) {
                    sub.events.push_back(s.events[i]);
                    idx.push_back(i);
                }
            }
            FiltrationState st(channels);
            for (std::size_t k = 0; k < idx.size(); ++k) keep[idx[k]] = filter_step(st, sub.events[k], p);
        }
        std::vector<Event> merged;
        for (std::size_t i = 0; i < s.events.size(); ++i) {
            if (keep[i]) merged.push_back(s.events[i]);
        }
        EXPECT_EQ(merged, direct);
    }
}

TEST(FiltrationProperties, RaisingThresholdsNeverAcceptsMore) {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        const unsigned channels = testgen::random_channels(rng);
        const auto s = testgen::random_stream(rng, channels, 400);
        FiltrationParams lo{static_cast<std::uint32_t>(rng() % 10), static_cast<std::uint32_t>(8 + rng() % 40), {}};
        FiltrationParams hi = lo;
        for (unsigned c = 0; c < channels; ++c) {
            lo.thresholds.push_back(1 + rng() % 80);
            hi.thresholds.push_back(lo.thresholds.back() + rng() % 40);
        }
        EXPECT_LE(filter_stream(s, hi).events.size(), filter_stream(s, lo).events.size());
    }
}
