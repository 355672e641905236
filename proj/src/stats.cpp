#include "evkws/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evkws/error.hpp"
#include "evkws/parallel.hpp"

namespace evkws {
namespace {

struct SampleSummary {
    std::uint64_t events = 0;
    std::vector<std::uint64_t> per_channel;
    std::uint64_t windows = 0;
    std::uint64_t window_max = 0;
    std::optional<double> kev_per_s;
};

SampleSummary summarize(const EventStream& s, std::uint32_t window_us) {
    SampleSummary out;
    out.events = s.events.size();
    out.per_channel.assign(s.config.channels, 0);
    if (s.events.empty()) return out;

    std::uint64_t current_window = 0;
    std::uint64_t in_window = 0;
    for (const Event& e : s.events) {
        ++out.per_channel[e.c];
        const std::uint64_t w = e.t / window_us;
        if (w != current_window) {
            out.window_max = std::max(out.window_max, in_window);
            current_window = w;
            in_window = 0;
        }
        ++in_window;
    }
    out.window_max = std::max(out.window_max, in_window);
    out.windows = current_window + 1;

    const std::uint32_t span = s.events.back().t - s.events.front().t;
    if (s.events.size() >= 2 && span >= kMinRateSpanUs) {
        out.kev_per_s = static_cast<double>(s.events.size() - 1) / (span * 1e-6) / 1000.0;
    }
    return out;
}

// Sum after sorting so that the result does not depend on sample order.
double ordered_sum(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return std::accumulate(values.begin(), values.end(), 0.0);
}

}  // namespace

StreamStats compute_stats(std::span<const EventStream> streams, std::uint32_t window_us, unsigned jobs) {
    if (streams.empty()) throw ValidationError("compute_stats: empty stream set");
    if (window_us == 0) throw ValidationError("compute_stats: window_us must be positive");
    const SensorConfig config = streams.front().config;
    for (const auto& s : streams) {
        if (!(s.config == config)) throw ValidationError("compute_stats: streams use different sensor configs");
    }

    std::vector<SampleSummary> parts(streams.size());
    parallel_for(streams.size(), jobs, [&](std::size_t i) { parts[i] = summarize(streams[i], window_us); });

    StreamStats st;
    st.window_us = window_us;
    st.sample_count = streams.size();
    const double k = static_cast<double>(streams.size());

    std::vector<double> rates;
    std::uint64_t windows = 0;
    std::vector<double> counts;
    for (const auto& p : parts) {
        st.total_events += p.events;
        st.events_per_sample_max = std::max(st.events_per_sample_max, p.events);
        counts.push_back(static_cast<double>(p.events));
        windows += p.windows;
        st.events_per_window_max = std::max(st.events_per_window_max, p.window_max);
        if (p.kev_per_s) rates.push_back(*p.kev_per_s);
    }
    st.events_per_sample_avg = static_cast<double>(st.total_events) / k;
    double var = 0.0;
    {
        std::vector<double> sq;
        for (double c : counts) sq.push_back((c - st.events_per_sample_avg) * (c - st.events_per_sample_avg));
        var = ordered_sum(std::move(sq)) / k;
    }
    st.events_per_sample_std = std::sqrt(var);

    st.rate_samples = rates.size();
    if (!rates.empty()) {
        st.kev_per_s_max = *std::max_element(rates.begin(), rates.end());
        st.kev_per_s_avg = ordered_sum(rates) / static_cast<double>(rates.size());
    }
    st.events_per_window_avg = windows ? static_cast<double>(st.total_events) / static_cast<double>(windows) : 0.0;

    st.per_channel.resize(config.channels);
    for (std::size_t c = 0; c < config.channels; ++c) {
        std::uint64_t sum = 0;
        for (const auto& p : parts) sum += p.per_channel[c];
        const double mean = static_cast<double>(sum) / k;
        std::vector<double> sq;
        sq.reserve(parts.size());
        for (const auto& p : parts) {
            const double d = static_cast<double>(p.per_channel[c]) - mean;
            sq.push_back(d * d);
        }
        st.per_channel[c] = {mean, std::sqrt(ordered_sum(std::move(sq)) / k)};
    }
    return st;
}

nlohmann::json to_json(const StreamStats& st) {
    nlohmann::json per_channel = nlohmann::json::array();
    for (const auto& c : st.per_channel) per_channel.push_back({{"mean", c.mean}, {"std", c.std}});
    return {
        {"total_events", st.total_events},
        {"samples", st.sample_count},
        {"events_per_sample", {{"avg", st.events_per_sample_avg},
                               {"std", st.events_per_sample_std},
                               {"max", st.events_per_sample_max}}},
        {"kev_per_s_avg", st.kev_per_s_avg},
        {"kev_per_s_max", st.kev_per_s_max},
        {"rate_samples", st.rate_samples},
        {"per_channel", per_channel},
        {"per_window", {{"avg", st.events_per_window_avg},
                        {"max", st.events_per_window_max},
                        {"window_us", st.window_us}}},
    };
}

}  // namespace evkws
