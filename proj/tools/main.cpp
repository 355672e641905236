#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "evkws/error.hpp"

namespace {

int report_error(const char* kind, const std::string& message, int code) {
    std::cerr << nlohmann::json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
    return code;
}

int exit_code_for(const evkws::Error& e) {
    using namespace evkws;
    if (dynamic_cast<const ConfigError*>(&e)) return cli::kExitConfig;
    if (dynamic_cast<const IoError*>(&e)) return cli::kExitIo;
    if (dynamic_cast<const ParseError*>(&e)) return cli::kExitParse;
    if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const OrderingError*>(&e) ||
        dynamic_cast<const OverflowError*>(&e)) {
        return cli::kExitValidation;
    }
    return cli::kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace evkws::cli;
    namespace fs = std::filesystem;

    CLI::App app{"Event-based keyword spotting: filtration, graph inference, metrics and hardware model"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions opts;
    std::string config_path;
    std::string format = "json";
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "Run configuration (INI)");
    app.add_option("--jobs", opts.jobs, "Maximum worker threads")->check(CLI::Range(1u, 1024u));
    auto* seed_opt = app.add_option("--seed", seed, "Seed for random weights and synthetic streams");
    app.add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--set", opts.overrides, "Override a config key: section.key=value");

    std::vector<std::string> stats_inputs;
    auto* stats = app.add_subcommand("stats", "Event statistics over one or more streams");
    stats->add_option("inputs", stats_inputs, "Event files")->required();

    std::string input;
    std::string output;
    auto* filter = app.add_subcommand("filter", "Apply decayed-potential filtration");
    filter->add_option("input", input)->required();
    filter->add_option("-o,--output", output, "Filtered stream path");

    auto* infer = app.add_subcommand("infer", "Per-window predictions as JSON lines");
    infer->add_option("input", input)->required();
    infer->add_option("-o,--output", output, "Write predictions here instead of stdout");

    std::string manifest;
    std::string records;
    auto* eval = app.add_subcommand("eval", "Evaluate a labeled manifest (CSV path,label,end_bin)");
    eval->add_option("manifest", manifest)->required();
    eval->add_option("--records", records, "Also write per-sample records as CSV");

    std::string trace;
    auto* sim = app.add_subcommand("simulate", "Replay graph edge counts through the hardware model");
    sim->add_option("input", input)->required();
    sim->add_option("--trace", trace, "Trace CSV output path");

    std::string out_dir;
    auto* ablate = app.add_subcommand("ablate", "Expand value lists in the config into a Cartesian sweep");
    ablate->add_option("--out-dir", out_dir, "Directory for expanded configs")->required();
    ablate->add_option("--manifest", manifest, "Evaluate every expanded config on this manifest");

    std::uint32_t duration_us = 1000000;
    double rate_hz = 40000.0;
    auto* synth = app.add_subcommand("synth", "Write a synthetic Poisson event stream");
    synth->add_option("output", output)->required();
    synth->add_option("--duration-us", duration_us);
    synth->add_option("--rate", rate_hz, "Aggregate events per second");

    int width = 72;
    auto* weights = app.add_subcommand("random-weights", "Write a random weight file");
    weights->add_option("output", output)->required();
    weights->add_option("--width", width, "Conv and head width")->check(CLI::Range(1, 4096));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return report_error("usage", e.what(), kExitUsage);
    }

    if (!config_path.empty()) opts.config_path = config_path;
    if (*seed_opt) opts.seed = seed;
    opts.format = format == "csv" ? ReportFormat::csv : ReportFormat::json;
    auto optional_path = [](const std::string& s) -> std::optional<fs::path> {
        if (s.empty()) return std::nullopt;
        return fs::path(s);
    };

    try {
        if (*stats) {
            cmd_stats(opts, {stats_inputs.begin(), stats_inputs.end()}, std::cout);
        } else if (*filter) {
            cmd_filter(opts, input, optional_path(output), std::cout);
        } else if (*infer) {
            cmd_infer(opts, input, optional_path(output), std::cout);
        } else if (*eval) {
            cmd_eval(opts, manifest, optional_path(records), std::cout);
        } else if (*sim) {
            cmd_simulate(opts, input, optional_path(trace), std::cout);
        } else if (*ablate) {
            cmd_ablate(opts, out_dir, optional_path(manifest), std::cout);
        } else if (*synth) {
            cmd_synth(opts, output, duration_us, rate_hz, std::cout);
        } else if (*weights) {
            cmd_random_weights(opts, output, width, std::cout);
        }
    } catch (const evkws::Error& e) {
        return report_error(e.kind(), e.what(), exit_code_for(e));
    } catch (const std::filesystem::filesystem_error& e) {
        return report_error("io", e.what(), kExitIo);
    } catch (const std::exception& e) {
        return report_error("error", e.what(), kExitFailure);
    }
    return kExitOk;
}
