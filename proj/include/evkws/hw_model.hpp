#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evkws/stats.hpp"

namespace evkws {

// How the max-pool learns that a window is complete.
enum class WindowClosure {
    // The sensor timestamp crossing a window boundary enters the conv-stage queue
    // as a zero-cost marker behind that window's events.
    boundary_marker,
    // The first processed event of a later window closes it; the last window
    // closes at window end + flush_timeout_us (or when its last event is done).
    next_event,
};

struct HwParams {
    double clock_hz = 200e6;
    std::uint32_t parallel_multipliers = 2;
    std::uint32_t cycle_base = 58;        // c0
    std::uint32_t cycle_per_vertex = 36;  // c1
    std::uint32_t fifo_depth = 1024;
    double nas_latency_us = 23.0;
    double head_latency_us = 2.11;
    std::uint32_t window_us = kWindowUs;
    WindowClosure closure = WindowClosure::boundary_marker;
    double flush_timeout_us = 0.0;

    void validate() const;
    // c0 + c1 * (1 + edges)
    std::uint64_t event_cycles(std::uint32_t edges) const;
    double event_latency_us(std::uint32_t edges) const;
};

struct CycleCalibration {
    std::uint32_t cycle_base = 0;
    std::uint32_t cycle_per_vertex = 0;
    std::uint64_t min_cycles = 0;
    std::uint64_t max_cycles = 0;
    // Residual of the rounded solution against the requested endpoints, in cycles.
    double residual_cycles = 0.0;
    bool exact = true;
};

// Two-point solve of cycles(E) = c0 + c1 * (1 + E) through latency(0) and
// latency(max_edges).
CycleCalibration calibrate_cycle_model(double min_latency_us = 0.47, double max_latency_us = 4.07,
                                       std::uint32_t max_edges = 20, double clock_hz = 200e6);

// Cycles per vertex implied by the vector multiplier layout: width / multipliers.
double cycles_per_vertex_from_layout(std::uint32_t feature_width, std::uint32_t parallel_multipliers);

struct Throughput {
    double max_eps = 0.0;  // every event without edges
    double min_eps = 0.0;  // every event with max_edges edges
};
Throughput throughput_envelope(const HwParams& params, std::uint32_t max_edges = 20);

struct SimEvent {
    std::uint32_t t = 0;  // sensor timestamp, us
    std::uint32_t edges = 0;
};

struct EventRecord {
    std::size_t index = 0;
    double arrival_us = 0.0;
    double admit_us = 0.0;
    double done_us = 0.0;
    std::uint32_t edges = 0;
    std::uint32_t queue_depth = 0;  // waiting events right after this arrival
    bool dropped = false;
};

struct WindowRecord {
    std::uint32_t index = 0;
    double end_us = 0.0;       // window end on the post-sensor timeline
    double close_us = 0.0;     // max-pool forwards to the head
    double predict_us = 0.0;   // close + head latency
    double latency_us() const { return predict_us - end_us; }
};

struct SimTrace {
    std::vector<EventRecord> events;
    std::vector<WindowRecord> windows;
    std::uint64_t overflows = 0;
    std::vector<double> overflow_times_us;
    std::uint32_t max_queue_depth = 0;
    double busy_us = 0.0;
};

// Single-server FIFO queue: events reach the conv stage at t + nas_latency, wait
// in a FIFO of fifo_depth entries (the event in service does not count) and are
// admitted in arrival order whenever the stage is idle. An arrival that finds the
// FIFO full is dropped and counted. Windows run from 0 through the window holding
// max(last event, end_us); predictions follow each closure by head_latency with
// the head overlapping conv work.
SimTrace simulate(std::span<const SimEvent> events, const HwParams& params,
                  std::optional<std::uint32_t> end_us = std::nullopt);

struct LatencyReport {
    std::size_t windows = 0;
    double window_latency_min_us = 0.0;
    double window_latency_mean_us = 0.0;
    double window_latency_p99_us = 0.0;
    double window_latency_max_us = 0.0;
    double end_to_end_min_us = 0.0;
    double end_to_end_max_us = 0.0;
    std::uint64_t processed = 0;
    std::uint64_t overflows = 0;
    std::uint32_t max_queue_depth = 0;
    double processed_eps = 0.0;  // processed events over the busy-to-last-done span
    std::vector<std::string> flags;
    std::string note;
};

// Reference figures reported for the hardware build, compared against as bounds.
inline constexpr double kPublishedWorstWindowLatencyUs = 18.62;
inline constexpr double kPublishedEndToEndMinUs = 25.0;
inline constexpr double kPublishedEndToEndMaxUs = 42.0;

LatencyReport latency_report(const SimTrace& trace, const HwParams& params);

struct LatencyEnvelope {
    double best_window_us = 0.0;
    double worst_window_us = 0.0;  // last event at the window end, empty queue, max edges
    double best_end_to_end_us = 0.0;
    double worst_end_to_end_us = 0.0;
};
LatencyEnvelope latency_envelope(const HwParams& params, std::uint32_t max_edges = 20);

nlohmann::json to_json(const HwParams& params);
nlohmann::json to_json(const LatencyReport& report);
nlohmann::json to_json(const Throughput& t);
std::string trace_csv(const SimTrace& trace);

}  // namespace evkws
