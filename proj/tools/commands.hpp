#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "evkws/config.hpp"

namespace evkws::cli {

enum class ReportFormat { json, csv };

struct GlobalOptions {
    std::optional<std::filesystem::path> config_path;
    std::vector<std::string> overrides;
    unsigned jobs = 1;
    std::optional<std::uint64_t> seed;
    ReportFormat format = ReportFormat::json;
};

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitParse = 4;
inline constexpr int kExitValidation = 5;
inline constexpr int kExitUsage = 64;

ConfigMap load_map(const GlobalOptions& opts);
RunConfig load_run_config(const GlobalOptions& opts);

void cmd_stats(const GlobalOptions& opts, const std::vector<std::filesystem::path>& inputs, std::ostream& out);
void cmd_filter(const GlobalOptions& opts, const std::filesystem::path& input,
                const std::optional<std::filesystem::path>& output, std::ostream& out);
void cmd_infer(const GlobalOptions& opts, const std::filesystem::path& input,
               const std::optional<std::filesystem::path>& output, std::ostream& out);
void cmd_eval(const GlobalOptions& opts, const std::filesystem::path& manifest,
              const std::optional<std::filesystem::path>& records_out, std::ostream& out);
void cmd_simulate(const GlobalOptions& opts, const std::filesystem::path& input,
                  const std::optional<std::filesystem::path>& trace_out, std::ostream& out);
void cmd_ablate(const GlobalOptions& opts, const std::filesystem::path& out_dir,
                const std::optional<std::filesystem::path>& manifest, std::ostream& out);
void cmd_synth(const GlobalOptions& opts, const std::filesystem::path& output, std::uint32_t duration_us,
               double rate_hz, std::ostream& out);
void cmd_random_weights(const GlobalOptions& opts, const std::filesystem::path& output, int width,
                        std::ostream& out);

}  // namespace evkws::cli
