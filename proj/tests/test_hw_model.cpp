#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "evkws/error.hpp"
#include "evkws/hw_model.hpp"

using namespace evkws;

TEST(Calibration, DefaultEndpoints) {
    const auto c = calibrate_cycle_model();
    EXPECT_EQ(c.cycle_base, 58u);
    EXPECT_EQ(c.cycle_per_vertex, 36u);
    EXPECT_EQ(c.min_cycles, 94u);
    EXPECT_EQ(c.max_cycles, 814u);
    EXPECT_TRUE(c.exact);
    HwParams p;
    EXPECT_NEAR(p.event_latency_us(0), 0.47, 1e-12);
    EXPECT_NEAR(p.event_latency_us(20), 4.07, 1e-12);
}

TEST(Calibration, RejectsBadInputs) {
    EXPECT_THROW(calibrate_cycle_model(4.0, 0.47), ValidationError);
    EXPECT_THROW(calibrate_cycle_model(0.47, 4.07, 0), ValidationError);
    const auto c = calibrate_cycle_model(0.47, 4.1, 20);
    EXPECT_FALSE(c.exact);
    EXPECT_GT(c.residual_cycles, 0.0);
}

TEST(Calibration, LayoutCyclesPerVertex) { EXPECT_DOUBLE_EQ(cycles_per_vertex_from_layout(72, 2), 36.0); }

TEST(Throughput, Envelope) {
    const auto t = throughput_envelope({});
    EXPECT_NEAR(t.max_eps, 200e6 / 94.0, 1e-6);
    EXPECT_NEAR(t.min_eps, 200e6 / 814.0, 1e-6);
    EXPECT_NEAR(t.max_eps / 1e6, 2.128, 5e-4);
    EXPECT_NEAR(t.min_eps / 1e3, 245.7, 5e-2);
}

TEST(LatencyEnvelope, Defaults) {
    const auto e = latency_envelope({});
    EXPECT_NEAR(e.best_end_to_end_us, 25.11, 1e-9);
    EXPECT_NEAR(e.worst_end_to_end_us, 29.18, 1e-9);
    EXPECT_LE(e.worst_window_us, kPublishedWorstWindowLatencyUs);
    EXPECT_LE(e.worst_end_to_end_us, kPublishedEndToEndMaxUs);
    EXPECT_NEAR(std::round(e.best_end_to_end_us), kPublishedEndToEndMinUs, 0.5);
}

TEST(Simulate, SingleEventLatencyIsHead) {
    const std::vector<SimEvent> ev{{0, 0}};
    HwParams p;
    const auto tr = simulate(ev, p);
    ASSERT_EQ(tr.windows.size(), 1u);
    EXPECT_NEAR(tr.windows[0].latency_us(), p.head_latency_us, 1e-9);
    EXPECT_NEAR(tr.events[0].done_us, 23.47, 1e-9);
}

TEST(Simulate, LateEventInWindow) {
    HwParams p;
    const std::vector<SimEvent> ev{{9999, 20}};
    const auto tr = simulate(ev, p);
    // done at 9999 + 23 + 4.07, window end at 10023
    EXPECT_NEAR(tr.windows[0].latency_us(), 3.07 + 2.11, 1e-9);
    EXPECT_LE(tr.windows[0].latency_us(), kPublishedWorstWindowLatencyUs);
    p.closure = WindowClosure::next_event;
    const auto flushed = simulate(ev, p);
    EXPECT_NEAR(flushed.windows[0].latency_us(), 3.07 + 2.11, 1e-9);
}

TEST(Simulate, NextEventClosure) {
    HwParams p;
    p.closure = WindowClosure::next_event;
    const std::vector<SimEvent> ev{{100, 0}, {10500, 0}};
    const auto tr = simulate(ev, p);
    ASSERT_EQ(tr.windows.size(), 2u);
    EXPECT_NEAR(tr.windows[0].close_us, 10500 + 23 + 0.47, 1e-9);
    p.flush_timeout_us = 50;
    const auto tr2 = simulate(ev, p);
    EXPECT_NEAR(tr2.windows[1].close_us, 20023 + 50, 1e-9);
}

TEST(Simulate, EmptyAndEndPadding) {
    const auto tr = simulate({}, {});
    EXPECT_TRUE(tr.windows.empty());
    const auto r = latency_report(tr, {});
    EXPECT_EQ(r.windows, 0u);
    EXPECT_EQ(r.note, "no windows");
    const auto padded = simulate({}, {}, 25000u);
    EXPECT_EQ(padded.windows.size(), 3u);
}

TEST(Simulate, OverloadOverflows) {
    HwParams p;
    std::vector<SimEvent> ev;
    for (std::uint32_t i = 0; i < 10000; ++i) ev.push_back({i * 2, 20});  // 500 kEv/s, max edges
    const auto tr = simulate(ev, p);
    EXPECT_GT(tr.overflows, 0u);
    EXPECT_EQ(tr.max_queue_depth, p.fifo_depth);
    // queue depth grows until the first drop
    std::uint32_t prev = 0;
    for (const auto& e : tr.events) {
        if (e.dropped) break;
        EXPECT_GE(e.queue_depth + 1, prev);
        prev = e.queue_depth;
    }
    const auto r = latency_report(tr, p);
    EXPECT_NE(std::find(r.flags.begin(), r.flags.end(), "fifo overflow"), r.flags.end());
    EXPECT_EQ(r.processed + r.overflows, ev.size());
}

TEST(Simulate, SaturatedThroughputMatchesEnvelope) {
    HwParams p;
    p.fifo_depth = 1u << 20;
    std::vector<SimEvent> ev(50000, SimEvent{0, 20});
    const auto r = latency_report(simulate(ev, p), p);
    EXPECT_EQ(r.overflows, 0u);
    EXPECT_NEAR(r.processed_eps / throughput_envelope(p).min_eps, 1.0, 0.01);
}

TEST(Simulate, WorkConservation) {
    HwParams p;
    std::mt19937_64 rng(3);
    std::vector<SimEvent> ev;
    std::uint32_t t = 0;
    for (int i = 0; i < 5000; ++i) {
        t += static_cast<std::uint32_t>(rng() % 6);
        ev.push_back({t, static_cast<std::uint32_t>(rng() % 21)});
    }
    const auto tr = simulate(ev, p);
    double busy = 0.0;
    double free_at = -1.0;
    for (std::size_t i = 0; i < tr.events.size(); ++i) {
        const auto& e = tr.events[i];
        if (e.dropped) continue;
        busy += p.event_latency_us(e.edges);
        EXPECT_GE(e.admit_us, e.arrival_us);
        EXPECT_GE(e.admit_us + 1e-9, free_at);
        // the stage never idles while work is waiting
        if (free_at > e.arrival_us) EXPECT_NEAR(e.admit_us, free_at, 1e-9);
        EXPECT_NEAR(e.done_us - e.admit_us, p.event_latency_us(e.edges), 1e-9);
        free_at = e.done_us;
    }
    EXPECT_NEAR(tr.busy_us, busy, 1e-6);
}

TEST(Simulate, MoreEdgesNeverFinishEarlier) {
    HwParams p;
    std::mt19937_64 rng(4);
    std::vector<SimEvent> ev;
    std::uint32_t t = 0;
    for (int i = 0; i < 3000; ++i) {
        t += static_cast<std::uint32_t>(rng() % 4);
        ev.push_back({t, static_cast<std::uint32_t>(rng() % 15)});
    }
    auto heavier = ev;
    for (auto& e : heavier) e.edges += static_cast<std::uint32_t>(rng() % 6);
    const auto a = simulate(ev, p);
    const auto b = simulate(heavier, p);
    for (std::size_t i = 0; i < ev.size(); ++i) EXPECT_GE(b.events[i].done_us + 1e-9, a.events[i].done_us);
    for (std::size_t w = 0; w < a.windows.size(); ++w) EXPECT_GE(b.windows[w].predict_us + 1e-9, a.windows[w].predict_us);
}

TEST(Simulate, RejectsUnorderedEvents) {
    const std::vector<SimEvent> ev{{10, 0}, {5, 0}};
    EXPECT_THROW(simulate(ev, {}), OrderingError);
}

TEST(Report, TraceCsvAndJson) {
    const std::vector<SimEvent> ev{{0, 0}, {1, 2}};
    HwParams p;
    const auto tr = simulate(ev, p);
    const auto csv = trace_csv(tr);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "event_index,arrival_us,admit_us,done_us,edges");
    const auto j = to_json(latency_report(tr, p));
    EXPECT_EQ(j["processed"], 2);
    EXPECT_TRUE(j["flags"].empty());
    EXPECT_EQ(to_json(p)["closure"], "boundary_marker");
}
