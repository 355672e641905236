#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "evkws/codec.hpp"
#include "evkws/config.hpp"
#include "evkws/error.hpp"
#include "evkws/filtration.hpp"
#include "evkws/gnn.hpp"
#include "evkws/graph.hpp"
#include "evkws/hw_model.hpp"
#include "evkws/metrics.hpp"
#include "evkws/stats.hpp"
#include "evkws/synth.hpp"
#include "evkws/weights.hpp"

namespace py = pybind11;
using namespace evkws;

namespace {

// JSON reports cross the boundary as text; the Python side decodes them.
template <typename T>
std::string dump(const T& value) {
    return to_json(value).dump();
}

}  // namespace

PYBIND11_MODULE(_evkws, m) {
    m.doc() = "Event-based keyword spotting core";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<OrderingError>(m, "OrderingError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<OverflowError>(m, "OverflowError", base.ptr());

    py::enum_<Topology>(m, "Topology").value("cascade", Topology::cascade).value("parallel", Topology::parallel);
    py::enum_<StreamFormat>(m, "StreamFormat").value("binary", StreamFormat::binary).value("csv", StreamFormat::csv);
    py::enum_<ScheduleKind>(m, "ScheduleKind")
        .value("constant", ScheduleKind::constant)
        .value("linear", ScheduleKind::linear)
        .value("exponential", ScheduleKind::exponential);
    py::enum_<WindowClosure>(m, "WindowClosure")
        .value("boundary_marker", WindowClosure::boundary_marker)
        .value("next_event", WindowClosure::next_event);

    py::class_<SensorConfig>(m, "SensorConfig")
        .def(py::init([](std::uint16_t channels, Topology topology) { return SensorConfig{channels, topology}; }),
             py::arg("channels") = 64, py::arg("topology") = Topology::cascade)
        .def_readwrite("channels", &SensorConfig::channels)
        .def_readwrite("topology", &SensorConfig::topology);

    py::class_<Event>(m, "Event")
        .def(py::init([](std::uint32_t t, std::uint16_t c, std::int8_t p) { return Event{t, c, p}; }), py::arg("t"),
             py::arg("c"), py::arg("p") = 1)
        .def_readwrite("t", &Event::t)
        .def_readwrite("c", &Event::c)
        .def_readwrite("p", &Event::p)
        .def("__eq__", [](const Event& a, const Event& b) { return a == b; })
        .def("__repr__", [](const Event& e) {
            return "Event(t=" + std::to_string(e.t) + ", c=" + std::to_string(e.c) + ", p=" + std::to_string(e.p) + ")";
        });

    py::class_<EventStream>(m, "EventStream")
        .def(py::init([](const SensorConfig& config, std::vector<Event> events, std::string sample_id) {
                 EventStream s;
                 s.config = config;
                 s.events = std::move(events);
                 s.sample_id = std::move(sample_id);
                 return s;
             }),
             py::arg("config") = SensorConfig{}, py::arg("events") = std::vector<Event>{}, py::arg("sample_id") = "")
        .def_readwrite("config", &EventStream::config)
        .def_readwrite("events", &EventStream::events)
        .def_readwrite("sample_id", &EventStream::sample_id)
        .def("validate", &EventStream::validate)
        .def("__len__", [](const EventStream& s) { return s.events.size(); });

    m.def("read_stream", &read_stream, py::arg("path"), py::arg("format"), py::arg("config") = SensorConfig{});
    m.def("write_stream", &write_stream, py::arg("stream"), py::arg("path"), py::arg("format"));
    m.def("synth_stream", &synth_stream_uniform, py::arg("seed"), py::arg("config"), py::arg("duration_us"),
          py::arg("rate_hz"));
    m.def(
        "stats_json",
        [](const std::vector<EventStream>& streams, std::uint32_t window_us) {
            return dump(compute_stats(streams, window_us));
        },
        py::arg("streams"), py::arg("window_us") = kWindowUs);

    py::class_<ThresholdSchedule>(m, "ThresholdSchedule")
        .def(py::init([](ScheduleKind kind, std::uint32_t start, std::uint32_t end) {
                 return ThresholdSchedule{kind, start, end};
             }),
             py::arg("kind") = ScheduleKind::exponential, py::arg("start") = 64, py::arg("end") = 32)
        .def_readwrite("kind", &ThresholdSchedule::kind)
        .def_readwrite("start", &ThresholdSchedule::start)
        .def_readwrite("end", &ThresholdSchedule::end);
    m.def("make_thresholds", &make_thresholds, py::arg("schedule"), py::arg("channels"));

    py::class_<FiltrationParams>(m, "FiltrationParams")
        .def(py::init([](std::uint32_t div, std::uint32_t w, std::vector<std::uint32_t> th) {
                 return FiltrationParams{div, w, std::move(th)};
             }),
             py::arg("div_factor"), py::arg("weight"), py::arg("thresholds"))
        .def_static("from_schedule", &FiltrationParams::from_schedule, py::arg("div_factor"), py::arg("weight"),
                    py::arg("schedule"), py::arg("channels"))
        .def_readwrite("div_factor", &FiltrationParams::div_factor)
        .def_readwrite("weight", &FiltrationParams::weight)
        .def_readwrite("thresholds", &FiltrationParams::thresholds);
    py::class_<FiltrationState>(m, "FiltrationState")
        .def(py::init<unsigned>(), py::arg("channels"))
        .def_readonly("v", &FiltrationState::v)
        .def_readonly("t_last", &FiltrationState::t_last);
    m.def("filter_step", &filter_step, py::arg("state"), py::arg("event"), py::arg("params"));
    m.def("filter_stream", &filter_stream, py::arg("stream"), py::arg("params"));

    py::class_<GraphParams>(m, "GraphParams")
        .def(py::init([](std::uint32_t r_c, std::uint32_t s, std::uint32_t lo, std::uint32_t hi, bool same) {
                 return GraphParams{r_c, s, lo, hi, same};
             }),
             py::arg("r_c") = 20, py::arg("skip_step") = 2, py::arg("r_t_low") = 0, py::arg("r_t_high") = 5000,
             py::arg("same_channel") = false)
        .def_readwrite("r_c", &GraphParams::r_c)
        .def_readwrite("skip_step", &GraphParams::skip_step)
        .def_readwrite("r_t_low", &GraphParams::r_t_low)
        .def_readwrite("r_t_high", &GraphParams::r_t_high)
        .def_readwrite("same_channel", &GraphParams::same_channel)
        .def("max_neighbors", &GraphParams::max_neighbors);
    m.def("default_graph_params", &default_graph_params, py::arg("channels"));

    py::class_<Neighbor>(m, "Neighbor")
        .def_readonly("event", &Neighbor::event)
        .def_readonly("dc", &Neighbor::dc)
        .def_readonly("dt", &Neighbor::dt);
    py::class_<NeighborSet>(m, "NeighborSet")
        .def_readonly("center", &NeighborSet::center)
        .def_readonly("neighbors", &NeighborSet::neighbors)
        .def("__eq__", [](const NeighborSet& a, const NeighborSet& b) { return a == b; });
    py::class_<GraphBuilder>(m, "GraphBuilder")
        .def(py::init<unsigned, GraphParams>(), py::arg("channels"), py::arg("params"))
        .def("insert", &GraphBuilder::insert, py::arg("event"))
        .def("query", &GraphBuilder::query, py::arg("event"))
        .def("reset", &GraphBuilder::reset);
    m.def(
        "brute_force_neighbors",
        [](const std::vector<Event>& history, const Event& e, const GraphParams& p) {
            return brute_force_neighbors(history, e, p);
        },
        py::arg("history"), py::arg("event"), py::arg("params"));
    m.def("edge_counts", &edge_counts, py::arg("stream"), py::arg("params"));

    py::class_<ModelWeights>(m, "ModelWeights")
        .def_readonly("class_count", &ModelWeights::class_count)
        .def_readonly("conv_widths", &ModelWeights::conv_widths)
        .def("parameter_count", &ModelWeights::parameter_count)
        .def("validate", &ModelWeights::validate)
        .def("__eq__", [](const ModelWeights& a, const ModelWeights& b) { return a == b; });
    m.def(
        "random_weights",
        [](std::uint64_t seed, int width, int class_count) {
            return random_weights(seed, Architecture::with_width(width, class_count));
        },
        py::arg("seed"), py::arg("width") = 72, py::arg("class_count") = 11);
    m.def("load_weights", &load_weights, py::arg("path"));
    m.def("save_weights", &save_weights, py::arg("weights"), py::arg("path"));

    py::class_<Prediction>(m, "Prediction")
        .def_readonly("window", &Prediction::window)
        .def_readonly("logits", &Prediction::logits)
        .def_readonly("conf", &Prediction::conf)
        .def_readonly("argmax_class", &Prediction::argmax_class)
        .def("__eq__", [](const Prediction& a, const Prediction& b) { return a == b; });
    py::class_<SampleDecision>(m, "SampleDecision")
        .def_readonly("predicted_class", &SampleDecision::predicted_class)
        .def_readonly("predicted_bin", &SampleDecision::predicted_bin);
    m.def("infer_stream", &infer_stream, py::arg("stream"), py::arg("weights"), py::arg("graph"),
          py::arg("filtration") = std::nullopt, py::call_guard<py::gil_scoped_release>());
    m.def(
        "decide", [](const std::vector<Prediction>& p) { return decide(p); }, py::arg("predictions"));

    py::class_<InferenceEngine>(m, "InferenceEngine")
        .def(py::init<const ModelWeights&, const SensorConfig&, GraphParams, std::optional<FiltrationParams>>(),
             py::arg("weights"), py::arg("sensor"), py::arg("graph"), py::arg("filtration") = std::nullopt,
             py::keep_alive<1, 2>())
        .def("push", &InferenceEngine::push, py::arg("event"))
        .def("finish", &InferenceEngine::finish)
        .def("reset", &InferenceEngine::reset)
        .def("run", &InferenceEngine::run, py::arg("stream"));

    py::class_<EvalRecord>(m, "EvalRecord")
        .def(py::init([](int y, std::optional<std::int64_t> t, int y_hat, std::int64_t t_hat, std::string id) {
                 return EvalRecord{std::move(id), y, t, y_hat, t_hat};
             }),
             py::arg("y"), py::arg("t"), py::arg("y_hat"), py::arg("t_hat"), py::arg("sample_id") = "")
        .def_readwrite("sample_id", &EvalRecord::sample_id)
        .def_readwrite("true_class", &EvalRecord::true_class)
        .def_readwrite("true_bin", &EvalRecord::true_bin)
        .def_readwrite("pred_class", &EvalRecord::pred_class)
        .def_readwrite("pred_bin", &EvalRecord::pred_bin);
    m.def(
        "accuracy", [](const std::vector<EvalRecord>& r) { return accuracy(r); }, py::arg("records"));
    m.def(
        "ts_accuracy", [](const std::vector<EvalRecord>& r, std::int64_t k) { return ts_accuracy(r, k); },
        py::arg("records"), py::arg("k"));
    m.def(
        "macro_f1", [](const std::vector<EvalRecord>& r) { return macro_f1(r).macro; }, py::arg("records"));
    m.def(
        "evaluate_json",
        [](const std::vector<EvalRecord>& r, const std::vector<std::int64_t>& ks) { return dump(evaluate(r, ks)); },
        py::arg("records"), py::arg("ks") = std::vector<std::int64_t>{1, 3});

    py::class_<HwParams>(m, "HwParams")
        .def(py::init<>())
        .def_readwrite("clock_hz", &HwParams::clock_hz)
        .def_readwrite("parallel_multipliers", &HwParams::parallel_multipliers)
        .def_readwrite("cycle_base", &HwParams::cycle_base)
        .def_readwrite("cycle_per_vertex", &HwParams::cycle_per_vertex)
        .def_readwrite("fifo_depth", &HwParams::fifo_depth)
        .def_readwrite("nas_latency_us", &HwParams::nas_latency_us)
        .def_readwrite("head_latency_us", &HwParams::head_latency_us)
        .def_readwrite("window_us", &HwParams::window_us)
        .def_readwrite("closure", &HwParams::closure)
        .def_readwrite("flush_timeout_us", &HwParams::flush_timeout_us)
        .def("event_latency_us", &HwParams::event_latency_us, py::arg("edges"));
    py::class_<CycleCalibration>(m, "CycleCalibration")
        .def_readonly("cycle_base", &CycleCalibration::cycle_base)
        .def_readonly("cycle_per_vertex", &CycleCalibration::cycle_per_vertex)
        .def_readonly("exact", &CycleCalibration::exact);
    m.def("calibrate_cycle_model", &calibrate_cycle_model, py::arg("min_latency_us") = 0.47,
          py::arg("max_latency_us") = 4.07, py::arg("max_edges") = 20, py::arg("clock_hz") = 200e6);
    py::class_<Throughput>(m, "Throughput")
        .def_readonly("max_eps", &Throughput::max_eps)
        .def_readonly("min_eps", &Throughput::min_eps);
    m.def("throughput_envelope", &throughput_envelope, py::arg("params") = HwParams{}, py::arg("max_edges") = 20);
    m.def(
        "simulate_json",
        [](const std::vector<std::pair<std::uint32_t, std::uint32_t>>& events, const HwParams& params) {
            std::vector<SimEvent> ev;
            ev.reserve(events.size());
            for (const auto& [t, e] : events) ev.push_back({t, e});
            const auto trace = simulate(ev, params);
            return dump(latency_report(trace, params));
        },
        py::arg("events"), py::arg("params") = HwParams{});
}
