#include "evkws/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "evkws/error.hpp"

namespace evkws {

EventStream synth_stream(std::uint64_t seed, const SensorConfig& config, std::uint32_t duration_us,
                         std::span<const double> rates_hz) {
    config.validate();
    if (rates_hz.size() != config.channels) {
        throw ValidationError("synth_stream: rate profile has " + std::to_string(rates_hz.size()) +
                              " entries for " + std::to_string(config.channels) + " channels");
    }
    for (double r : rates_hz) {
        if (!(r >= 0.0) || !std::isfinite(r)) throw ValidationError("synth_stream: rates must be finite and >= 0");
    }

    EventStream stream;
    stream.config = config;
    stream.sample_id = "synth-" + std::to_string(seed);
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution polarity(0.5);
    for (std::uint16_t c = 0; c < config.channels; ++c) {
        if (rates_hz[c] == 0.0) continue;
        std::exponential_distribution<double> gap(rates_hz[c] * 1e-6);  // per microsecond
        double t = gap(rng);
        while (t < duration_us) {
            stream.events.push_back({static_cast<std::uint32_t>(t), c, polarity(rng) ? std::int8_t{1} : std::int8_t{-1}});
            t += gap(rng);
        }
    }
    std::stable_sort(stream.events.begin(), stream.events.end(), [](const Event& a, const Event& b) {
        return a.t != b.t ? a.t < b.t : a.c < b.c;
    });
    return stream;
}

EventStream synth_stream_uniform(std::uint64_t seed, const SensorConfig& config, std::uint32_t duration_us,
                                 double total_rate_hz) {
    std::vector<double> rates(config.channels, total_rate_hz / std::max<int>(1, config.channels));
    return synth_stream(seed, config, duration_us, rates);
}

}  // namespace evkws
