#pragma once

#include <cstdint>
#include <span>

#include "evkws/event.hpp"

namespace evkws {

// Poisson arrivals per channel at `rates_hz[c]` events per second, random
// polarity, merged and sorted by (t, c). Deterministic in `seed`.
EventStream synth_stream(std::uint64_t seed, const SensorConfig& config, std::uint32_t duration_us,
                         std::span<const double> rates_hz);

// Convenience: spreads `total_rate_hz` evenly across all channels.
EventStream synth_stream_uniform(std::uint64_t seed, const SensorConfig& config,
                                 std::uint32_t duration_us, double total_rate_hz);

}  // namespace evkws
