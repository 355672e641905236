#include "evkws/graph.hpp"

#include <string>

#include "evkws/error.hpp"

namespace evkws {

void GraphParams::validate() const {
    if (skip_step < 1) throw ValidationError("skip_step must be >= 1");
    if (r_t_low > r_t_high) throw ValidationError("r_t_low must not exceed r_t_high");
}

std::uint32_t GraphParams::max_neighbors() const {
    return 2 * (r_c / skip_step) + (same_channel ? 1 : 0);
}

GraphBuilder::GraphBuilder(unsigned channels, GraphParams params) : params_(params), latest_(channels) {
    params_.validate();
}

void GraphBuilder::reset() {
    std::fill(latest_.begin(), latest_.end(), std::nullopt);
    last_t_.reset();
}

NeighborSet GraphBuilder::query(const Event& event) const {
    NeighborSet out{event, {}};
    const auto c = static_cast<std::int64_t>(event.c);
    const auto reach = static_cast<std::int64_t>(params_.r_c / params_.skip_step);
    const auto step = static_cast<std::int64_t>(params_.skip_step);
    for (std::int64_t k = -reach; k <= reach; ++k) {
        if (k == 0 && !params_.same_channel) continue;
        const std::int64_t other = c + k * step;
        if (other < 0 || other >= static_cast<std::int64_t>(latest_.size())) continue;
        const auto& rec = latest_[static_cast<std::size_t>(other)];
        if (!rec || rec->t > event.t) continue;
        const std::uint32_t dt = event.t - rec->t;
        if (dt < params_.r_t_low || dt > params_.r_t_high) continue;
        out.neighbors.push_back({*rec, static_cast<std::int32_t>(k * step), dt});
    }
    return out;
}

NeighborSet GraphBuilder::insert(const Event& event) {
    if (event.c >= latest_.size()) {
        throw ValidationError("graph insert: channel " + std::to_string(event.c) + " out of range");
    }
    if (last_t_ && event.t < *last_t_) {
        throw OrderingError("graph insert: t=" + std::to_string(event.t) + " after t=" + std::to_string(*last_t_));
    }
    NeighborSet out = query(event);
    latest_[event.c] = event;
    last_t_ = event.t;
    return out;
}

NeighborSet brute_force_neighbors(std::span<const Event> history, const Event& event, const GraphParams& params) {
    NeighborSet out{event, {}};
    // Most recent qualifying event per channel; later entries in history win.
    std::vector<std::optional<Event>> best;
    for (const Event& h : history) {
        if (h.c >= best.size()) best.resize(h.c + 1u);
        best[h.c] = h;
    }
    for (std::size_t ch = 0; ch < best.size(); ++ch) {
        if (!best[ch]) continue;
        const Event& h = *best[ch];
        const std::int64_t dc = static_cast<std::int64_t>(h.c) - static_cast<std::int64_t>(event.c);
        const std::int64_t adc = dc < 0 ? -dc : dc;
        if (dc == 0 && !params.same_channel) continue;
        if (adc > params.r_c || adc % params.skip_step != 0) continue;
        if (h.t > event.t) continue;
        const std::uint32_t dt = event.t - h.t;
        if (dt < params.r_t_low || dt > params.r_t_high) continue;
        out.neighbors.push_back({h, static_cast<std::int32_t>(dc), dt});
    }
    return out;
}

std::vector<std::uint32_t> edge_counts(const EventStream& stream, const GraphParams& params) {
    GraphBuilder builder(stream.config.channels, params);
    std::vector<std::uint32_t> out;
    out.reserve(stream.events.size());
    for (const Event& e : stream.events) out.push_back(static_cast<std::uint32_t>(builder.insert(e).neighbors.size()));
    return out;
}

nlohmann::json to_json(const NeighborSet& set) {
    nlohmann::json ns = nlohmann::json::array();
    for (const auto& n : set.neighbors) ns.push_back({{"c", n.event.c}, {"dt", n.dt}});
    return {{"t", set.center.t}, {"c", set.center.c}, {"neighbors", ns}};
}

}  // namespace evkws
