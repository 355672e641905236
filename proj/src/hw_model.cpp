#include "evkws/hw_model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>

#include "evkws/error.hpp"

namespace evkws {

void HwParams::validate() const {
    if (!(clock_hz > 0.0)) throw ConfigError("hw.clock_hz must be positive");
    if (cycle_base == 0 || cycle_per_vertex == 0) throw ConfigError("hw cycle constants must be positive");
    if (parallel_multipliers == 0) throw ConfigError("hw.parallel_multipliers must be positive");
    if (window_us == 0) throw ConfigError("hw.window_us must be positive");
    if (nas_latency_us < 0 || head_latency_us < 0 || flush_timeout_us < 0) {
        throw ConfigError("hw latencies must be non-negative");
    }
}

std::uint64_t HwParams::event_cycles(std::uint32_t edges) const {
    return std::uint64_t{cycle_base} + std::uint64_t{cycle_per_vertex} * (1 + std::uint64_t{edges});
}

double HwParams::event_latency_us(std::uint32_t edges) const {
    return static_cast<double>(event_cycles(edges)) * 1e6 / clock_hz;
}

CycleCalibration calibrate_cycle_model(double min_latency_us, double max_latency_us, std::uint32_t max_edges,
                                       double clock_hz) {
    if (!(max_latency_us > min_latency_us) || min_latency_us <= 0) {
        throw ValidationError("calibration needs 0 < min_latency < max_latency");
    }
    if (max_edges < 1) throw ValidationError("calibration needs max_edges >= 1");
    if (!(clock_hz > 0)) throw ValidationError("calibration needs a positive clock");

    const double lo = min_latency_us * clock_hz / 1e6;
    const double hi = max_latency_us * clock_hz / 1e6;
    const double per_vertex = (hi - lo) / max_edges;
    const double base = lo - per_vertex;

    CycleCalibration cal;
    const auto c1 = std::llround(per_vertex);
    const auto c0 = std::llround(base);
    if (c1 < 1 || c0 < 1) throw ValidationError("calibration gives non-positive cycle constants");
    cal.cycle_per_vertex = static_cast<std::uint32_t>(c1);
    cal.cycle_base = static_cast<std::uint32_t>(c0);
    cal.min_cycles = static_cast<std::uint64_t>(c0 + c1);
    cal.max_cycles = static_cast<std::uint64_t>(c0 + c1 * (1 + static_cast<long long>(max_edges)));
    cal.residual_cycles = std::abs(static_cast<double>(cal.min_cycles) - lo) +
                          std::abs(static_cast<double>(cal.max_cycles) - hi);
    cal.exact = cal.residual_cycles < 1e-6;
    return cal;
}

double cycles_per_vertex_from_layout(std::uint32_t feature_width, std::uint32_t parallel_multipliers) {
    if (parallel_multipliers == 0) throw ValidationError("parallel_multipliers must be positive");
    return static_cast<double>(feature_width) / parallel_multipliers;
}

Throughput throughput_envelope(const HwParams& params, std::uint32_t max_edges) {
    params.validate();
    return {params.clock_hz / static_cast<double>(params.event_cycles(0)),
            params.clock_hz / static_cast<double>(params.event_cycles(max_edges))};
}

SimTrace simulate(std::span<const SimEvent> events, const HwParams& params, std::optional<std::uint32_t> end_us) {
    params.validate();
    SimTrace trace;
    trace.events.reserve(events.size());

    std::deque<double> waiting;  // admit times of queued events, non-decreasing
    double server_free = -1e300;
    std::optional<std::uint32_t> prev_t;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const SimEvent& e = events[i];
        if (prev_t && e.t < *prev_t) throw OrderingError("simulate: events must be time-ordered");
        prev_t = e.t;

        EventRecord rec;
        rec.index = i;
        rec.edges = e.edges;
        rec.arrival_us = e.t + params.nas_latency_us;
        while (!waiting.empty() && waiting.front() <= rec.arrival_us) waiting.pop_front();

        const double admit = std::max(rec.arrival_us, server_free);
        if (admit > rec.arrival_us) {
            if (waiting.size() >= params.fifo_depth) {
                rec.dropped = true;
                rec.admit_us = rec.done_us = std::nan("");
                rec.queue_depth = static_cast<std::uint32_t>(waiting.size());
                ++trace.overflows;
                trace.overflow_times_us.push_back(rec.arrival_us);
                trace.events.push_back(rec);
                continue;
            }
            waiting.push_back(admit);
        }
        rec.admit_us = admit;
        const double service = params.event_latency_us(e.edges);
        rec.done_us = admit + service;
        server_free = rec.done_us;
        trace.busy_us += service;
        rec.queue_depth = static_cast<std::uint32_t>(waiting.size());
        trace.max_queue_depth = std::max(trace.max_queue_depth, rec.queue_depth);
        trace.events.push_back(rec);
    }

    std::optional<std::uint32_t> last_window;
    if (!events.empty()) last_window = events.back().t / params.window_us;
    if (end_us) last_window = std::max(last_window.value_or(0), *end_us / params.window_us);
    if (!last_window) return trace;

    // Last processed event per window and first processed event of each window.
    const std::size_t n_windows = std::size_t{*last_window} + 1;
    std::vector<double> last_done(n_windows, std::nan(""));
    std::vector<double> first_done(n_windows, std::nan(""));
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& rec = trace.events[i];
        if (rec.dropped) continue;
        const std::size_t w = events[i].t / params.window_us;
        last_done[w] = rec.done_us;
        if (std::isnan(first_done[w])) first_done[w] = rec.done_us;
    }

    double done_so_far = -1e300;  // latest completion among windows <= w
    for (std::size_t w = 0; w < n_windows; ++w) {
        if (!std::isnan(last_done[w])) done_so_far = std::max(done_so_far, last_done[w]);
        WindowRecord win;
        win.index = static_cast<std::uint32_t>(w);
        win.end_us = static_cast<double>(w + 1) * params.window_us + params.nas_latency_us;
        if (params.closure == WindowClosure::boundary_marker) {
            win.close_us = std::max(win.end_us, done_so_far);
        } else {
            double next = std::nan("");
            for (std::size_t v = w + 1; v < n_windows && std::isnan(next); ++v) next = first_done[v];
            win.close_us = std::isnan(next) ? std::max(win.end_us + params.flush_timeout_us, done_so_far) : next;
        }
        win.predict_us = win.close_us + params.head_latency_us;
        trace.windows.push_back(win);
    }
    return trace;
}

LatencyReport latency_report(const SimTrace& trace, const HwParams& params) {
    LatencyReport r;
    r.overflows = trace.overflows;
    r.max_queue_depth = trace.max_queue_depth;
    double first_admit = std::nan("");
    double last_done = std::nan("");
    for (const auto& e : trace.events) {
        if (e.dropped) continue;
        ++r.processed;
        if (std::isnan(first_admit)) first_admit = e.admit_us;
        last_done = e.done_us;
    }
    if (r.processed > 0 && last_done > first_admit) {
        r.processed_eps = static_cast<double>(r.processed) / ((last_done - first_admit) * 1e-6);
    }
    r.windows = trace.windows.size();
    if (trace.windows.empty()) {
        r.note = "no windows";
        return r;
    }
    std::vector<double> lat;
    lat.reserve(trace.windows.size());
    for (const auto& w : trace.windows) lat.push_back(w.latency_us());
    std::sort(lat.begin(), lat.end());
    r.window_latency_min_us = lat.front();
    r.window_latency_max_us = lat.back();
    r.window_latency_mean_us = std::accumulate(lat.begin(), lat.end(), 0.0) / static_cast<double>(lat.size());
    const auto p99 = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(lat.size()))) - 1;
    r.window_latency_p99_us = lat[std::min(p99, lat.size() - 1)];
    r.end_to_end_min_us = params.nas_latency_us + r.window_latency_min_us;
    r.end_to_end_max_us = params.nas_latency_us + r.window_latency_max_us;

    if (r.window_latency_max_us > kPublishedWorstWindowLatencyUs) {
        r.flags.push_back("window latency above published worst case of 18.62 us");
    }
    if (r.end_to_end_max_us > kPublishedEndToEndMaxUs) r.flags.push_back("end-to-end latency above 42 us");
    if (r.overflows > 0) r.flags.push_back("fifo overflow");
    return r;
}

LatencyEnvelope latency_envelope(const HwParams& params, std::uint32_t max_edges) {
    params.validate();
    LatencyEnvelope env;
    env.best_window_us = params.head_latency_us;
    env.worst_window_us = params.head_latency_us + params.event_latency_us(max_edges);
    env.best_end_to_end_us = params.nas_latency_us + env.best_window_us;
    env.worst_end_to_end_us = params.nas_latency_us + env.worst_window_us;
    return env;
}

nlohmann::json to_json(const HwParams& p) {
    return {{"clock_hz", p.clock_hz},
            {"parallel_multipliers", p.parallel_multipliers},
            {"cycle_base", p.cycle_base},
            {"cycle_per_vertex", p.cycle_per_vertex},
            {"fifo_depth", p.fifo_depth},
            {"nas_latency_us", p.nas_latency_us},
            {"head_latency_us", p.head_latency_us},
            {"window_us", p.window_us},
            {"closure", p.closure == WindowClosure::boundary_marker ? "boundary_marker" : "next_event"},
            {"flush_timeout_us", p.flush_timeout_us}};
}

nlohmann::json to_json(const LatencyReport& r) {
    nlohmann::json j = {{"windows", r.windows},
                        {"processed", r.processed},
                        {"overflows", r.overflows},
                        {"max_queue_depth", r.max_queue_depth},
                        {"processed_eps", r.processed_eps},
                        {"flags", r.flags}};
    if (r.windows > 0) {
        j["window_latency_us"] = {{"min", r.window_latency_min_us},
                                  {"mean", r.window_latency_mean_us},
                                  {"p99", r.window_latency_p99_us},
                                  {"max", r.window_latency_max_us}};
        j["end_to_end_us"] = {{"min", r.end_to_end_min_us}, {"max", r.end_to_end_max_us}};
    }
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

nlohmann::json to_json(const Throughput& t) { return {{"max_eps", t.max_eps}, {"min_eps", t.min_eps}}; }

std::string trace_csv(const SimTrace& trace) {
    std::ostringstream out;
    out.precision(12);
    out << "event_index,arrival_us,admit_us,done_us,edges\n";
    for (const auto& e : trace.events) {
        out << e.index << ',' << e.arrival_us << ',';
        if (e.dropped) {
            out << ",,";
        } else {
            out << e.admit_us << ',' << e.done_us << ',';
        }
        out << e.edges << '\n';
    }
    return out.str();
}

}  // namespace evkws
