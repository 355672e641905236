#include "evkws/gnn.hpp"

#include <algorithm>
#include <string>

#include "evkws/error.hpp"
#include "evkws/quant.hpp"

namespace evkws {
namespace {

// Rounded integer mean, halves away from zero.
std::int64_t rounded_mean(std::int64_t sum, std::int64_t n) {
    const std::int64_t q = (2 * (sum < 0 ? -sum : sum) + n) / (2 * n);
    return sum < 0 ? -q : q;
}

std::vector<std::int8_t> linear_forward(const Block& b, std::span<const std::int8_t> x, bool relu) {
    std::vector<std::int8_t> y(static_cast<std::size_t>(b.out));
    const auto cols = b.weight_cols();
    for (std::size_t o = 0; o < y.size(); ++o) {
        const std::int8_t* row = b.weight.data() + o * cols;
        std::int32_t acc = b.bias[o];
        for (std::size_t i = 0; i < cols; ++i) acc += static_cast<std::int32_t>(row[i]) * x[i];
        const std::int8_t q = requantize(acc, b.scale_num, b.scale_shift);
        y[o] = relu && q < 0 ? std::int8_t{0} : q;
    }
    return y;
}

void gru_forward(const Block& b, std::span<const std::int8_t> x, std::vector<std::int8_t>& h) {
    const auto in = static_cast<std::size_t>(b.in);
    const auto hid = static_cast<std::size_t>(b.out);
    const auto cols = b.weight_cols();
    // acc_x / acc_h per gate row: [r | z | n] x hid
    std::vector<std::int32_t> acc_x(3 * hid), acc_h(3 * hid);
    for (std::size_t r = 0; r < 3 * hid; ++r) {
        const std::int8_t* row = b.weight.data() + r * cols;
        std::int32_t ax = b.bias[r];
        for (std::size_t i = 0; i < in; ++i) ax += static_cast<std::int32_t>(row[i]) * x[i];
        std::int32_t ah = b.bias[3 * hid + r];
        for (std::size_t j = 0; j < hid; ++j) ah += static_cast<std::int32_t>(row[in + j]) * h[j];
        acc_x[r] = ax;
        acc_h[r] = ah;
    }
    std::vector<std::int8_t> next(hid);
    for (std::size_t o = 0; o < hid; ++o) {
        const std::int32_t r = sigmoid_q7(requantize(std::int64_t{acc_x[o]} + acc_h[o], b.scale_num, b.scale_shift));
        const std::int32_t z =
            sigmoid_q7(requantize(std::int64_t{acc_x[hid + o]} + acc_h[hid + o], b.scale_num, b.scale_shift));
        const std::int64_t n_pre = acc_x[2 * hid + o] + round_shift(std::int64_t{r} * acc_h[2 * hid + o], 7);
        const std::int32_t n = tanh_q7(requantize(n_pre, b.scale_num, b.scale_shift));
        next[o] = saturate_int8(round_shift(std::int64_t{128 - z} * n + std::int64_t{z} * h[o], 7));
    }
    h = std::move(next);
}

}  // namespace

std::vector<std::int8_t> pointnet_conv(const Block& layer, std::span<const std::int8_t> center,
                                       std::span<const ConvInput> neighbors) {
    const auto features = static_cast<std::size_t>(layer.in - kPositionalInputs);
    if (layer.in < kPositionalInputs || center.size() != features) {
        throw ConfigError("pointnet_conv: center has " + std::to_string(center.size()) + " features, layer expects " +
                          std::to_string(features));
    }
    const auto cols = layer.weight_cols();
    std::vector<std::int8_t> out(static_cast<std::size_t>(layer.out), 0);

    auto apply = [&](std::span<const std::int8_t> x, std::int8_t dc, std::int8_t dt) {
        for (std::size_t o = 0; o < out.size(); ++o) {
            const std::int8_t* row = layer.weight.data() + o * cols;
            std::int32_t acc = layer.bias[o];
            for (std::size_t i = 0; i < features; ++i) acc += static_cast<std::int32_t>(row[i]) * x[i];
            acc += static_cast<std::int32_t>(row[features]) * dc;
            acc += static_cast<std::int32_t>(row[features + 1]) * dt;
            // Rectified values are >= 0, so 0 is the identity of the running max.
            out[o] = std::max(out[o], requantize(acc, layer.scale_num, layer.scale_shift));
        }
    };

    apply(center, 0, 0);
    for (const auto& n : neighbors) {
        if (n.features.size() != features) {
            throw ConfigError("pointnet_conv: neighbor has " + std::to_string(n.features.size()) +
                              " features, layer expects " + std::to_string(features));
        }
        apply(n.features, n.dc, n.dt);
    }
    return out;
}

std::vector<std::int8_t> first_layer_inputs(const NeighborSet& neighbors, const Event& event) {
    std::int64_t sum_dc = 0;
    std::int64_t sum_dt = 0;
    for (const auto& n : neighbors.neighbors) {
        sum_dc += n.dc;
        sum_dt += n.dt;
    }
    const auto count = static_cast<std::int64_t>(neighbors.neighbors.size());
    const std::int64_t mean_dc = count ? rounded_mean(sum_dc, count) : 0;
    const std::int64_t mean_dt = count ? rounded_mean(sum_dt, count) : 0;
    return {saturate_int8(mean_dc), quantize_dt(mean_dt), event.p};
}

WindowPool::WindowPool(std::size_t width, std::uint32_t window_us)
    : width_(width), window_us_(window_us), max_(width, 0) {
    if (window_us_ == 0) throw ValidationError("window length must be positive");
}

void WindowPool::reset() {
    current_.reset();
    std::fill(max_.begin(), max_.end(), std::int8_t{0});
}

std::vector<PooledWindow> WindowPool::advance(std::uint32_t t) {
    const std::uint32_t target = t / window_us_;
    std::vector<PooledWindow> out;
    if (!current_) {
        // The first observed timestamp opens window 0; windows before it are empty.
        current_ = 0;
    }
    if (target < *current_) {
        throw OrderingError("window pool: t=" + std::to_string(t) + " belongs to a closed window");
    }
    while (*current_ < target) {
        out.push_back({*current_, max_});
        std::fill(max_.begin(), max_.end(), std::int8_t{0});
        ++*current_;
    }
    return out;
}

std::vector<PooledWindow> WindowPool::push(std::span<const std::int8_t> features, std::uint32_t t) {
    if (features.size() != width_) throw ConfigError("window pool: feature width mismatch");
    auto out = advance(t);
    for (std::size_t i = 0; i < width_; ++i) max_[i] = std::max(max_[i], features[i]);
    return out;
}

std::optional<PooledWindow> WindowPool::flush() {
    if (!current_) return std::nullopt;
    PooledWindow w{*current_, max_};
    reset();
    return w;
}

HeadState HeadState::zeros(const ModelWeights& weights) {
    HeadState s;
    for (const auto& b : weights.head) {
        if (b.kind == BlockKind::gru) s.hidden.emplace_back(static_cast<std::size_t>(b.out), 0);
    }
    return s;
}

Prediction head_forward(const ModelWeights& weights, std::span<const std::int8_t> pooled, HeadState& state,
                        std::uint32_t window) {
    if (weights.head.empty() || pooled.size() != static_cast<std::size_t>(weights.head.front().in)) {
        throw ConfigError("head_forward: pooled width " + std::to_string(pooled.size()) +
                          " does not match the first head block");
    }
    std::size_t grus = 0;
    for (const auto& b : weights.head) grus += b.kind == BlockKind::gru;
    if (state.hidden.size() != grus) throw ConfigError("head_forward: recurrent state does not match the head");

    std::vector<std::int8_t> x(pooled.begin(), pooled.end());
    std::size_t g = 0;
    for (std::size_t i = 0; i < weights.head.size(); ++i) {
        const Block& b = weights.head[i];
        if (b.kind == BlockKind::gru) {
            auto& h = state.hidden[g++];
            if (h.size() != static_cast<std::size_t>(b.out)) throw ConfigError("head_forward: GRU state width mismatch");
            gru_forward(b, x, h);
            x = h;
        } else {
            x = linear_forward(b, x, i + 1 < weights.head.size());
        }
    }

    Prediction p;
    p.window = window;
    p.logits.assign(x.begin(), x.end() - 1);
    p.conf = x.back();
    p.argmax_class = static_cast<int>(std::max_element(p.logits.begin(), p.logits.end()) - p.logits.begin());
    return p;
}

InferenceEngine::InferenceEngine(const ModelWeights& weights, const SensorConfig& sensor, GraphParams graph,
                                 std::optional<FiltrationParams> filtration)
    : weights_(weights),
      sensor_(sensor),
      filtration_params_(std::move(filtration)),
      filtration_(sensor.channels),
      graph_(sensor.channels, graph),
      pool_(static_cast<std::size_t>(weights.feature_width())),
      head_(HeadState::zeros(weights)),
      layer_inputs_(sensor.channels) {
    sensor_.validate();
    weights_.validate();
    if (filtration_params_) filtration_params_->validate(sensor.channels);
}

void InferenceEngine::reset() {
    filtration_ = FiltrationState(sensor_.channels);
    graph_.reset();
    pool_.reset();
    head_ = HeadState::zeros(weights_);
    for (auto& v : layer_inputs_) v.clear();
    last_t_.reset();
    accepted_ = 0;
}

void InferenceEngine::emit(std::vector<PooledWindow>&& windows, std::vector<Prediction>& out) {
    for (auto& w : windows) out.push_back(head_forward(weights_, w.features, head_, w.index));
}

std::vector<Prediction> InferenceEngine::push(const Event& event) {
    validate_event(event, sensor_);
    if (last_t_ && event.t < *last_t_) {
        throw OrderingError("inference: t=" + std::to_string(event.t) + " after t=" + std::to_string(*last_t_));
    }
    last_t_ = event.t;

    std::vector<Prediction> out;
    emit(pool_.advance(event.t), out);
    if (filtration_params_ && !filter_step(filtration_, event, *filtration_params_)) return out;
    ++accepted_;

    const NeighborSet ns = graph_.insert(event);
    std::vector<std::vector<std::int8_t>> inputs(kConvLayers);
    inputs[0] = first_layer_inputs(ns, event);
    std::vector<std::int8_t> features;
    std::vector<ConvInput> neighbors(ns.neighbors.size());
    for (int l = 0; l < kConvLayers; ++l) {
        for (std::size_t k = 0; k < ns.neighbors.size(); ++k) {
            const auto& n = ns.neighbors[k];
            neighbors[k] = {layer_inputs_[n.event.c][static_cast<std::size_t>(l)], saturate_int8(n.dc),
                            quantize_dt(n.dt)};
        }
        features = pointnet_conv(weights_.conv[static_cast<std::size_t>(l)], inputs[static_cast<std::size_t>(l)],
                                 neighbors);
        if (l + 1 < kConvLayers) inputs[static_cast<std::size_t>(l + 1)] = features;
    }
    layer_inputs_[event.c] = std::move(inputs);
    emit(pool_.push(features, event.t), out);
    return out;
}

std::vector<Prediction> InferenceEngine::finish() {
    std::vector<Prediction> out;
    if (auto w = pool_.flush()) out.push_back(head_forward(weights_, w->features, head_, w->index));
    return out;
}

std::vector<Prediction> InferenceEngine::run(const EventStream& stream) {
    if (!(stream.config == sensor_)) throw ValidationError("inference: stream sensor config differs from engine");
    stream.validate();
    reset();
    std::vector<Prediction> out;
    for (const Event& e : stream.events) {
        auto p = push(e);
        out.insert(out.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
    }
    auto tail = finish();
    out.insert(out.end(), std::make_move_iterator(tail.begin()), std::make_move_iterator(tail.end()));
    reset();
    return out;
}

std::vector<Prediction> infer_stream(const EventStream& stream, const ModelWeights& weights, const GraphParams& graph,
                                     const std::optional<FiltrationParams>& filtration) {
    InferenceEngine engine(weights, stream.config, graph, filtration);
    return engine.run(stream);
}

SampleDecision decide(std::span<const Prediction> predictions) {
    SampleDecision d;
    if (predictions.empty()) return d;
    const Prediction* best = &predictions.front();
    for (const auto& p : predictions) {
        if (p.conf > best->conf) best = &p;
    }
    d.predicted_bin = best->window;
    d.predicted_class = best->argmax_class;
    return d;
}

nlohmann::json to_json(const Prediction& p) {
    return {{"window", p.window}, {"logits", p.logits}, {"conf", p.conf}, {"class", p.argmax_class}};
}

}  // namespace evkws
