#include "evkws/filtration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "evkws/error.hpp"

namespace evkws {

std::string_view to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::constant: return "constant";
        case ScheduleKind::linear: return "linear";
        case ScheduleKind::exponential: return "exponential";
    }
    return "?";
}

ScheduleKind parse_schedule_kind(std::string_view text) {
    if (text == "constant") return ScheduleKind::constant;
    if (text == "linear") return ScheduleKind::linear;
    if (text == "exponential") return ScheduleKind::exponential;
    throw ConfigError("unknown threshold schedule '" + std::string(text) + "'");
}

std::vector<std::uint32_t> make_thresholds(const ThresholdSchedule& schedule, unsigned channels) {
    if (schedule.start < 1 || schedule.end < 1) {
        throw ValidationError("threshold schedule endpoints must be >= 1");
    }
    if (channels == 0) throw ValidationError("threshold schedule needs at least one channel");
    std::vector<std::uint32_t> out(channels, schedule.start);
    if (channels == 1 || schedule.kind == ScheduleKind::constant || schedule.start == schedule.end) {
        return out;
    }
    const double a = schedule.start;
    const double b = schedule.end;
    for (unsigned c = 0; c < channels; ++c) {
        const double frac = static_cast<double>(c) / static_cast<double>(channels - 1);
        const double value = schedule.kind == ScheduleKind::linear ? a + (b - a) * frac
                                                                   : a * std::pow(b / a, frac);
        out[c] = static_cast<std::uint32_t>(std::max(1.0, std::floor(value + 0.5)));
    }
    return out;
}

FiltrationParams FiltrationParams::from_schedule(std::uint32_t div_factor, std::uint32_t weight,
                                                 const ThresholdSchedule& schedule, unsigned channels) {
    return {div_factor, weight, make_thresholds(schedule, channels)};
}

void FiltrationParams::validate(unsigned channels) const {
    if (thresholds.size() != channels) {
        throw ValidationError("filtration has " + std::to_string(thresholds.size()) + " thresholds for " +
                              std::to_string(channels) + " channels");
    }
    // Timestamps are 32-bit, so any shift of 32 or more decays by zero.
    if (div_factor > 32) throw ValidationError("div_factor must be <= 32");
    for (auto th : thresholds) {
        if (th < 1) throw ValidationError("thresholds must be >= 1");
    }
}

bool filter_step(FiltrationState& state, const Event& event, const FiltrationParams& params) {
    const auto c = event.c;
    if (c >= state.v.size()) {
        throw ValidationError("channel " + std::to_string(c) + " outside filtration state");
    }
    if (event.t < state.t_last[c]) {
        throw OrderingError("time regression on channel " + std::to_string(c) + ": " +
                            std::to_string(event.t) + " < " + std::to_string(state.t_last[c]));
    }
    const std::uint64_t dt = event.t - state.t_last[c];
    const std::uint64_t decay = params.div_factor >= 32 ? 0 : dt >> params.div_factor;
    const std::uint64_t decayed = state.v[c] > decay ? state.v[c] - decay : 0;
    const std::uint64_t v = decayed + params.weight;
    if (v > std::numeric_limits<std::uint32_t>::max()) {
        throw OverflowError("filtration potential overflow on channel " + std::to_string(c));
    }
    state.t_last[c] = event.t;
    if (v < params.thresholds[c]) {
        state.v[c] = static_cast<std::uint32_t>(v);
        return false;
    }
    state.v[c] = 0;
    return true;
}

EventStream filter_stream(const EventStream& stream, const FiltrationParams& params) {
    stream.validate();
    params.validate(stream.config.channels);
    EventStream out;
    out.config = stream.config;
    out.sample_id = stream.sample_id;
    out.label = stream.label;
    out.end_of_word_bin = stream.end_of_word_bin;
    FiltrationState state(stream.config.channels);
    for (const Event& e : stream.events) {
        if (filter_step(state, e, params)) out.events.push_back(e);
    }
    return out;
}

}  // namespace evkws
