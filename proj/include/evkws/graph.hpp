#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "evkws/event.hpp"

namespace evkws {

struct GraphParams {
    std::uint32_t r_c = 20;
    std::uint32_t skip_step = 2;
    std::uint32_t r_t_low = 0;
    std::uint32_t r_t_high = 5000;
    // Also consider the previous event on the new event's own channel
    // (offset 0). Off by default, which keeps the degree at 2*floor(r_c/s).
    bool same_channel = false;

    void validate() const;
    // Upper bound on the neighbor count, self-loop excluded.
    std::uint32_t max_neighbors() const;
};

struct Neighbor {
    Event event;
    std::int32_t dc = 0;   // neighbor.c - center.c
    std::uint32_t dt = 0;  // center.t - neighbor.t, >= 0
    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Neighbors are ordered by ascending channel.
struct NeighborSet {
    Event center;
    std::vector<Neighbor> neighbors;
    friend bool operator==(const NeighborSet&, const NeighborSet&) = default;
};

// Time-directed graph over a stream. One record per channel: the most recent
// inserted event. A new event links to the latest event on each channel c' with
// |c' - c| <= r_c, (c' - c) % skip_step == 0 and r_t_low <= t - t' <= r_t_high.
class GraphBuilder {
public:
    GraphBuilder(unsigned channels, GraphParams params);

    // Throws OrderingError when event.t is earlier than the previous insert.
    NeighborSet insert(const Event& event);
    // Same neighbor query without recording the event.
    NeighborSet query(const Event& event) const;

    void reset();
    const GraphParams& params() const { return params_; }
    unsigned channels() const { return static_cast<unsigned>(latest_.size()); }
    const std::optional<Event>& latest(unsigned channel) const { return latest_[channel]; }

private:
    GraphParams params_;
    std::vector<std::optional<Event>> latest_;
    std::optional<std::uint32_t> last_t_;
};

// Reference scan over a whole history. Test oracle for GraphBuilder.
NeighborSet brute_force_neighbors(std::span<const Event> history, const Event& event, const GraphParams& params);

// Neighbor count per event after replaying the stream through a fresh builder.
std::vector<std::uint32_t> edge_counts(const EventStream& stream, const GraphParams& params);

nlohmann::json to_json(const NeighborSet& set);

}  // namespace evkws
