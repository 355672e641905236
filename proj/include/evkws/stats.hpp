#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "evkws/event.hpp"

namespace evkws {

inline constexpr std::uint32_t kWindowUs = 10000;

struct ChannelStat {
    double mean = 0.0;
    double std = 0.0;
};

struct StreamStats {
    std::uint64_t total_events = 0;
    std::uint64_t sample_count = 0;
    // Per-sample event counts.
    double events_per_sample_avg = 0.0;
    double events_per_sample_std = 0.0;
    std::uint64_t events_per_sample_max = 0;
    // Rates in kEv/s over each sample's first-to-last event span.
    double kev_per_s_avg = 0.0;
    double kev_per_s_max = 0.0;
    std::uint64_t rate_samples = 0;
    std::vector<ChannelStat> per_channel;
    double events_per_window_avg = 0.0;
    std::uint64_t events_per_window_max = 0;
    std::uint32_t window_us = kWindowUs;
};

// Samples whose span is shorter than this are left out of the rate statistics.
inline constexpr std::uint32_t kMinRateSpanUs = 1000;

// Rates are (n - 1) / span: the number of inter-event intervals per second.
// Windows are fixed width, aligned at t = 0 of every sample, and run through the
// window holding the sample's last event.
StreamStats compute_stats(std::span<const EventStream> streams, std::uint32_t window_us = kWindowUs,
                          unsigned jobs = 1);

nlohmann::json to_json(const StreamStats& stats);

}  // namespace evkws
