#include "commands.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <nlohmann/json.hpp>

#include "evkws/codec.hpp"
#include "evkws/error.hpp"
#include "evkws/filtration.hpp"
#include "evkws/gnn.hpp"
#include "evkws/metrics.hpp"
#include "evkws/parallel.hpp"
#include "evkws/stats.hpp"
#include "evkws/synth.hpp"
#include "evkws/weights.hpp"

namespace evkws::cli {
namespace {

using nlohmann::json;

StreamFormat stream_format(const RunConfig& config, const std::filesystem::path& path) {
    return config.format.value_or(format_from_extension(path));
}

EventStream load_stream(const RunConfig& config, const std::filesystem::path& path) {
    return read_stream(path, stream_format(config, path), config.sensor);
}

std::shared_ptr<const ModelWeights> load_model(const RunConfig& config) {
    if (config.weights_path) return std::make_shared<const ModelWeights>(load_weights(*config.weights_path));
    Architecture arch;
    arch.class_count = config.class_count;
    return std::make_shared<const ModelWeights>(random_weights(config.random_seed, arch));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << text;
    if (!f) throw IoError("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

struct ManifestEntry {
    std::filesystem::path path;
    int label = 0;
    std::optional<std::int64_t> end_bin;
};

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest) {
    const std::string text = read_text(manifest);
    const auto base = manifest.parent_path();
    std::vector<ManifestEntry> out;
    std::istringstream in(text);
    std::uint64_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || (line_no == 1 && line.rfind("path", 0) == 0)) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string item; std::getline(ss, item, ',');) f.push_back(item);
        if (line.back() == ',') f.emplace_back();
        if (f.size() < 2 || f.size() > 3) {
            throw ParseError("manifest line " + std::to_string(line_no) + ": expected path,label,end_bin", line_no);
        }
        ManifestEntry e;
        e.path = f[0];
        if (e.path.is_relative()) e.path = base / e.path;
        try {
            e.label = std::stoi(f[1]);
            if (f.size() == 3 && !f[2].empty()) e.end_bin = std::stoll(f[2]);
        } catch (const std::exception&) {
            throw ParseError("manifest line " + std::to_string(line_no) + ": bad label or end_bin", line_no);
        }
        out.push_back(std::move(e));
    }
    return out;
}

json eval_run(const RunConfig& config, const std::filesystem::path& manifest, unsigned jobs,
              std::vector<EvalRecord>* records_out) {
    const auto entries = read_manifest(manifest);
    if (entries.empty()) throw ValidationError("manifest lists no samples");
    const auto model = load_model(config);
    const auto filtration = config.filtration();

    std::vector<EvalRecord> records(entries.size());
    std::vector<EventStream> pre(entries.size());
    std::vector<EventStream> post(entries.size());
    parallel_for(entries.size(), jobs, [&](std::size_t i) {
        EventStream s = load_stream(config, entries[i].path);
        s.sample_id = entries[i].path.string();
        const auto predictions = infer_stream(s, *model, config.graph, filtration);
        const auto d = decide(predictions);
        records[i] = {s.sample_id, entries[i].label, entries[i].end_bin, d.predicted_class, d.predicted_bin};
        post[i] = filtration ? filter_stream(s, *filtration) : s;
        pre[i] = std::move(s);
    });
    const MetricReport report = evaluate(records);
    json j = to_json(report);
    j["event_rates"] = to_json(event_rate_report(pre, post));
    j["config"] = to_json(config);
    j["model_parameters"] = model->parameter_count();
    if (records_out) *records_out = std::move(records);
    return j;
}

}  // namespace

ConfigMap load_map(const GlobalOptions& opts) {
    ConfigMap map = opts.config_path ? load_config_map(*opts.config_path) : ConfigMap{};
    apply_overrides(map, opts.overrides);
    if (opts.seed) map["model"]["random_seed"] = std::to_string(*opts.seed);
    return map;
}

RunConfig load_run_config(const GlobalOptions& opts) {
    const auto base = opts.config_path ? opts.config_path->parent_path() : std::filesystem::path{};
    return resolve_config(load_map(opts), base);
}

void cmd_stats(const GlobalOptions& opts, const std::vector<std::filesystem::path>& inputs, std::ostream& out) {
    const RunConfig config = load_run_config(opts);
    std::vector<EventStream> streams(inputs.size());
    parallel_for(inputs.size(), opts.jobs, [&](std::size_t i) { streams[i] = load_stream(config, inputs[i]); });
    const StreamStats st = compute_stats(streams, kWindowUs, opts.jobs);
    if (opts.format == ReportFormat::csv) {
        out << "channel,mean,std\n";
        for (std::size_t c = 0; c < st.per_channel.size(); ++c) {
            out << c << ',' << st.per_channel[c].mean << ',' << st.per_channel[c].std << '\n';
        }
        return;
    }
    json j = to_json(st);
    j["config"] = to_json(config);
    out << j.dump(2) << '\n';
}

void cmd_filter(const GlobalOptions& opts, const std::filesystem::path& input,
                const std::optional<std::filesystem::path>& output, std::ostream& out) {
    const RunConfig config = load_run_config(opts);
    const auto target = output ? output : config.output;
    if (!target) throw ConfigError("filter needs an output path (-o or io.output)");
    const EventStream in = load_stream(config, input);
    const auto params = config.filtration();
    const EventStream filtered = params ? filter_stream(in, *params) : in;
    write_stream(filtered, *target, stream_format(config, *target));

    json j;
    j["input_events"] = in.events.size();
    j["output_events"] = filtered.events.size();
    j["reduction_pct"] = in.events.empty()
                             ? json(nullptr)
                             : json(100.0 * (1.0 - static_cast<double>(filtered.events.size()) /
                                                       static_cast<double>(in.events.size())));
    j["output"] = target->string();
    j["config"] = to_json(config);
    out << j.dump(2) << '\n';
}

void cmd_infer(const GlobalOptions& opts, const std::filesystem::path& input,
               const std::optional<std::filesystem::path>& output, std::ostream& out) {
    const RunConfig config = load_run_config(opts);
    const auto model = load_model(config);
    const EventStream s = load_stream(config, input);
    const auto predictions = infer_stream(s, *model, config.graph, config.filtration());

    std::ostringstream text;
    if (opts.format == ReportFormat::csv) {
        text << "window,conf,class";
        for (int k = 0; k < model->class_count; ++k) text << ",logit" << k;
        text << '\n';
        for (const auto& p : predictions) {
            text << p.window << ',' << p.conf << ',' << p.argmax_class;
            for (auto l : p.logits) text << ',' << l;
            text << '\n';
        }
    } else {
        for (const auto& p : predictions) text << to_json(p).dump() << '\n';
    }
    const auto target = output ? output : config.output;
    if (target) {
        write_text(*target, text.str());
        const auto d = decide(predictions);
        out << json{{"predictions", predictions.size()},
                    {"class", d.predicted_class},
                    {"end_bin", d.predicted_bin},
                    {"output", target->string()},
                    {"config", to_json(config)}}
                   .dump(2)
            << '\n';
    } else {
        out << text.str();
    }
}

void cmd_eval(const GlobalOptions& opts, const std::filesystem::path& manifest,
              const std::optional<std::filesystem::path>& records_out, std::ostream& out) {
    const RunConfig config = load_run_config(opts);
    std::vector<EvalRecord> records;
    const json j = eval_run(config, manifest, opts.jobs, &records);
    if (records_out) {
        std::ostringstream csv;
        csv << "sample_id,y,t,y_hat,t_hat\n";
        for (const auto& r : records) {
            csv << r.sample_id << ',' << r.true_class << ',' << (r.true_bin ? std::to_string(*r.true_bin) : "")
                << ',' << r.pred_class << ',' << r.pred_bin << '\n';
        }
        write_text(*records_out, csv.str());
    }
    if (opts.format == ReportFormat::csv) {
        out << "sample_id,y,t,y_hat,t_hat\n";
        for (const auto& r : records) {
            out << r.sample_id << ',' << r.true_class << ',' << (r.true_bin ? std::to_string(*r.true_bin) : "")
                << ',' << r.pred_class << ',' << r.pred_bin << '\n';
        }
        return;
    }
    out << j.dump(2) << '\n';
}

void cmd_simulate(const GlobalOptions& opts, const std::filesystem::path& input,
                  const std::optional<std::filesystem::path>& trace_out, std::ostream& out) {
    const RunConfig config = load_run_config(opts);
    const EventStream raw = load_stream(config, input);
    const auto params = config.filtration();
    const EventStream s = params ? filter_stream(raw, *params) : raw;
    const auto edges = edge_counts(s, config.graph);

    std::vector<SimEvent> events(s.events.size());
    for (std::size_t i = 0; i < events.size(); ++i) events[i] = {s.events[i].t, edges[i]};
    std::optional<std::uint32_t> end;
    if (!raw.events.empty()) end = raw.events.back().t;
    const SimTrace trace = simulate(events, config.hw, end);
    const LatencyReport report = latency_report(trace, config.hw);

    if (trace_out) write_text(*trace_out, trace_csv(trace));
    if (opts.format == ReportFormat::csv && !trace_out) {
        out << trace_csv(trace);
        return;
    }
    const auto max_edges = config.graph.max_neighbors();
    json j = to_json(report);
    j["throughput_envelope"] = to_json(throughput_envelope(config.hw, max_edges));
    const auto env = latency_envelope(config.hw, max_edges);
    j["latency_envelope_us"] = {{"best_window", env.best_window_us},
                                {"worst_window", env.worst_window_us},
                                {"best_end_to_end", env.best_end_to_end_us},
                                {"worst_end_to_end", env.worst_end_to_end_us}};
    j["input_events"] = raw.events.size();
    j["simulated_events"] = s.events.size();
    j["config"] = to_json(config);
    out << j.dump(2) << '\n';
}

void cmd_ablate(const GlobalOptions& opts, const std::filesystem::path& out_dir,
                const std::optional<std::filesystem::path>& manifest, std::ostream& out) {
    const ConfigMap map = load_map(opts);
    const auto sweep = expand_sweep(map);
    std::filesystem::create_directories(out_dir);
    const auto base = opts.config_path ? opts.config_path->parent_path() : std::filesystem::path{};
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        const RunConfig config = resolve_config(sweep[i], base);
        std::ostringstream name;
        name << "run_" << i << ".ini";
        const auto path = out_dir / name.str();
        write_text(path, to_ini(sweep[i]));
        json line = {{"run", i}, {"config_file", path.string()}, {"config", to_json(config)}};
        if (manifest) line["report"] = eval_run(config, *manifest, opts.jobs, nullptr);
        out << line.dump() << '\n';
    }
}

void cmd_synth(const GlobalOptions& opts, const std::filesystem::path& output, std::uint32_t duration_us,
               double rate_hz, std::ostream& out) {
    const RunConfig config = load_run_config(opts);
    const EventStream s = synth_stream_uniform(opts.seed.value_or(0), config.sensor, duration_us, rate_hz);
    write_stream(s, output, stream_format(config, output));
    out << json{{"events", s.events.size()}, {"output", output.string()}}.dump() << '\n';
}

void cmd_random_weights(const GlobalOptions& opts, const std::filesystem::path& output, int width,
                        std::ostream& out) {
    const RunConfig config = load_run_config(opts);
    const Architecture arch = Architecture::with_width(width, config.class_count);
    const ModelWeights w = random_weights(opts.seed.value_or(config.random_seed), arch);
    save_weights(w, output);
    out << json{{"parameters", w.parameter_count()}, {"output", output.string()}}.dump() << '\n';
}

}  // namespace evkws::cli
