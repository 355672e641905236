#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "evkws/event.hpp"

namespace evkws {

enum class ScheduleKind { constant, linear, exponential };

std::string_view to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(std::string_view text);

// Per-channel thresholds interpolated from channel 0 (`start`) to channel C-1 (`end`).
struct ThresholdSchedule {
    ScheduleKind kind = ScheduleKind::exponential;
    std::uint32_t start = 64;
    std::uint32_t end = 32;
};

// Values are rounded half-up and clamped to >= 1.
std::vector<std::uint32_t> make_thresholds(const ThresholdSchedule& schedule, unsigned channels);

struct FiltrationParams {
    std::uint32_t div_factor = 8;
    std::uint32_t weight = 32;
    std::vector<std::uint32_t> thresholds;

    static FiltrationParams from_schedule(std::uint32_t div_factor, std::uint32_t weight,
                                          const ThresholdSchedule& schedule, unsigned channels);
    void validate(unsigned channels) const;
};

struct FiltrationState {
    std::vector<std::uint32_t> t_last;
    std::vector<std::uint32_t> v;

    explicit FiltrationState(unsigned channels = 0) : t_last(channels, 0), v(channels, 0) {}
};

// One iteration of the decayed-potential filter:
//   v[c] = max(0, v[c] - floor((t - t_last[c]) / 2^div_factor)) + w
//   t_last[c] = t
//   accept iff v[c] >= threshold[c]; on accept v[c] = 0
// Polarity is not consulted. Throws OrderingError if t < t_last[c] and
// OverflowError if the potential leaves the 32-bit range.
bool filter_step(FiltrationState& state, const Event& event, const FiltrationParams& params);

// Left fold of filter_step over the stream from a fresh state.
EventStream filter_stream(const EventStream& stream, const FiltrationParams& params);

}  // namespace evkws
