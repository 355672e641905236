#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evkws {

enum class Topology : std::uint8_t { cascade = 0, parallel = 1 };

std::string_view to_string(Topology topology);
Topology parse_topology(std::string_view text);

// Sensor layout: 32, 64 or 128 frequency channels, cascade or parallel filter bank.
struct SensorConfig {
    std::uint16_t channels = 64;
    Topology topology = Topology::cascade;

    static bool supported_channel_count(unsigned channels);
    void validate() const;

    friend bool operator==(const SensorConfig&, const SensorConfig&) = default;
};

// One address event: timestamp in microseconds, channel index, polarity (+1/-1).
struct Event {
    std::uint32_t t = 0;
    std::uint16_t c = 0;
    std::int8_t p = 1;

    friend bool operator==(const Event&, const Event&) = default;
};

struct EventStream {
    SensorConfig config;
    std::vector<Event> events;
    std::string sample_id;
    std::optional<int> label;
    std::optional<int> end_of_word_bin;

    // Throws ValidationError on a bad event and OrderingError on a decreasing timestamp.
    void validate() const;

    // Codec identity: config and events. Labels and ids travel out of band.
    bool same_content(const EventStream& other) const {
        return config == other.config && events == other.events;
    }
};

void validate_event(const Event& event, const SensorConfig& config);

}  // namespace evkws
