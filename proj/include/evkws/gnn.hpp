#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "evkws/event.hpp"
#include "evkws/filtration.hpp"
#include "evkws/graph.hpp"
#include "evkws/stats.hpp"
#include "evkws/weights.hpp"

namespace evkws {

// Features of neighbor j as seen from the center node i.
struct ConvInput {
    std::span<const std::int8_t> features;
    std::int8_t dc = 0;  // saturated c_j - c_i
    std::int8_t dt = 0;  // quantize_dt(t_i - t_j)
};

// max over j in N(i) + {i} of relu(requant(W [x_j, dc_j, dt_j] + b)).
// The center contributes with zero relative position.
std::vector<std::int8_t> pointnet_conv(const Block& layer, std::span<const std::int8_t> center,
                                       std::span<const ConvInput> neighbors);

// Layer-1 input of a new node: [mean dc, quantize_dt(mean dt), polarity],
// means rounded to nearest (halves away from zero) and 0 without neighbors.
std::vector<std::int8_t> first_layer_inputs(const NeighborSet& neighbors, const Event& event);

struct PooledWindow {
    std::uint32_t index = 0;
    std::vector<std::int8_t> features;
};

// Element-wise max over each fixed window, aligned at t = 0. Windows close when a
// later timestamp is observed or on flush; skipped windows close as all-zero.
class WindowPool {
public:
    WindowPool(std::size_t width, std::uint32_t window_us = kWindowUs);

    // Propagates time to `t`, returning every window that ended before it.
    std::vector<PooledWindow> advance(std::uint32_t t);
    // advance(t), then folds `features` into the window holding t.
    std::vector<PooledWindow> push(std::span<const std::int8_t> features, std::uint32_t t);
    // Emits the open window, if any, and resets.
    std::optional<PooledWindow> flush();
    void reset();

private:
    std::size_t width_;
    std::uint32_t window_us_;
    std::optional<std::uint32_t> current_;
    std::vector<std::int8_t> max_;
};

struct Prediction {
    std::uint32_t window = 0;
    std::vector<std::int32_t> logits;
    std::int32_t conf = 0;
    int argmax_class = 0;  // first index on ties

    friend bool operator==(const Prediction&, const Prediction&) = default;
};

// Hidden vectors of each GRU block, Q7.
struct HeadState {
    std::vector<std::vector<std::int8_t>> hidden;

    static HeadState zeros(const ModelWeights& weights);
};

// Runs the head blocks in order. Linear blocks other than the last are followed by
// ReLU. GRU blocks use the sigmoid/tanh lookup tables and update `state`.
Prediction head_forward(const ModelWeights& weights, std::span<const std::int8_t> pooled, HeadState& state,
                        std::uint32_t window = 0);

// Streaming pipeline for one sample: filtration, graph, four conv layers,
// window max-pool and head. Every raw event advances the window clock, filtered
// or not.
class InferenceEngine {
public:
    InferenceEngine(const ModelWeights& weights, const SensorConfig& sensor, GraphParams graph,
                    std::optional<FiltrationParams> filtration);

    std::vector<Prediction> push(const Event& event);
    std::vector<Prediction> finish();
    void reset();

    // reset(), feed the whole stream, finish().
    std::vector<Prediction> run(const EventStream& stream);

    std::uint64_t accepted_events() const { return accepted_; }

private:
    void emit(std::vector<PooledWindow>&& windows, std::vector<Prediction>& out);

    const ModelWeights& weights_;
    SensorConfig sensor_;
    std::optional<FiltrationParams> filtration_params_;
    FiltrationState filtration_;
    GraphBuilder graph_;
    WindowPool pool_;
    HeadState head_;
    // layer_inputs_[channel][layer]: inputs of each conv layer for the latest node on a channel.
    std::vector<std::vector<std::vector<std::int8_t>>> layer_inputs_;
    std::optional<std::uint32_t> last_t_;
    std::uint64_t accepted_ = 0;
};

std::vector<Prediction> infer_stream(const EventStream& stream, const ModelWeights& weights,
                                     const GraphParams& graph, const std::optional<FiltrationParams>& filtration);

struct SampleDecision {
    int predicted_class = -1;
    std::uint32_t predicted_bin = 0;
};

// End-of-word bin = first argmax of conf; class = argmax of logits at that bin.
// Empty input gives class -1.
SampleDecision decide(std::span<const Prediction> predictions);

nlohmann::json to_json(const Prediction& p);

}  // namespace evkws
