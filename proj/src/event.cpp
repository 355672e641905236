#include "evkws/event.hpp"

#include <string>

#include "evkws/error.hpp"

namespace evkws {

std::string_view to_string(Topology topology) {
    return topology == Topology::cascade ? "cascade" : "parallel";
}

Topology parse_topology(std::string_view text) {
    if (text == "cascade") return Topology::cascade;
    if (text == "parallel") return Topology::parallel;
    throw ConfigError("unknown topology '" + std::string(text) + "' (expected cascade|parallel)");
}

bool SensorConfig::supported_channel_count(unsigned channels) {
    return channels == 32 || channels == 64 || channels == 128;
}

void SensorConfig::validate() const {
    if (!supported_channel_count(channels)) {
        throw ValidationError("unsupported channel count " + std::to_string(channels) +
                              " (expected 32, 64 or 128)");
    }
    if (topology != Topology::cascade && topology != Topology::parallel) {
        throw ValidationError("unknown topology code " +
                              std::to_string(static_cast<int>(topology)));
    }
}

void validate_event(const Event& event, const SensorConfig& config) {
    if (event.c >= config.channels) {
        throw ValidationError("event at t=" + std::to_string(event.t) + " has channel " +
                              std::to_string(event.c) + " >= " + std::to_string(config.channels));
    }
    if (event.p != 1 && event.p != -1) {
        throw ValidationError("event at t=" + std::to_string(event.t) + " has polarity " +
                              std::to_string(event.p) + " (expected -1 or +1)");
    }
}

void EventStream::validate() const {
    config.validate();
    for (std::size_t i = 0; i < events.size(); ++i) {
        validate_event(events[i], config);
        if (i > 0 && events[i].t < events[i - 1].t) {
            throw OrderingError("event " + std::to_string(i) + " at t=" +
                                std::to_string(events[i].t) + " precedes t=" +
                                std::to_string(events[i - 1].t));
        }
    }
}

}  // namespace evkws
